#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

namespace httplib {
class Client;
}

namespace adt {

// "scheme://host[:port]" plus path, split from a full URL.
struct UrlParts {
  std::string origin;
  std::string path;
};
UrlParts split_url(const std::string& url);

// Caps concurrent requests to one endpoint.
class ConnectionLimiter {
 public:
  explicit ConnectionLimiter(int limit) : slots_(limit < 1 ? 1 : limit) {}

  class Permit {
   public:
    explicit Permit(ConnectionLimiter& l) : limiter_(l) { limiter_.slots_.acquire(); }
    ~Permit() { limiter_.slots_.release(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    ConnectionLimiter& limiter_;
  };

 private:
  std::counting_semaphore<1024> slots_;
};

std::unique_ptr<httplib::Client> make_client(const std::string& origin, std::chrono::milliseconds timeout);

}  // namespace adt
