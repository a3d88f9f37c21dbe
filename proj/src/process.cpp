#include "adt/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "adt/error.hpp"
#include "adt/text.hpp"

namespace adt {

CommandResult run_command(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error("process_error", "empty command");
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw Error("process_error", std::strerror(errno));
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    throw Error("process_error", std::strerror(errno));
  }

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error("process_error", std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::execvp(args[0], args.data());
    const std::string msg = "cannot execute '" + argv[0] + "': " + std::strerror(errno) + "\n";
    (void)!::write(STDERR_FILENO, msg.data(), msg.size());
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  CommandResult result;
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open_fds = 2;
  char buf[8192];
  while (open_fds > 0) {
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = ::read(fds[i].fd, buf, sizeof(buf));
      if (n > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) ::close(f.fd);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

std::vector<std::string> expand_command(const std::string& command_template,
                                        const std::map<std::string, std::string>& values) {
  std::vector<std::string> argv;
  for (std::string_view tok : text::split_ws(command_template)) {
    std::string out;
    std::size_t i = 0;
    while (i < tok.size()) {
      if (tok[i] == '{') {
        const auto close = tok.find('}', i);
        if (close == std::string_view::npos) throw ConfigError("unterminated placeholder in '" + command_template + "'");
        const std::string name(tok.substr(i + 1, close - i - 1));
        const auto it = values.find(name);
        if (it == values.end()) throw ConfigError("unknown placeholder {" + name + "} in '" + command_template + "'");
        out += it->second;
        i = close + 1;
      } else {
        out.push_back(tok[i++]);
      }
    }
    argv.push_back(std::move(out));
  }
  if (argv.empty()) throw ConfigError("empty command template");
  return argv;
}

}  // namespace adt
