// Acceptance suite: one PASS/FAIL line per criterion.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "adt/corpus.hpp"
#include "adt/error.hpp"
#include "adt/frames.hpp"
#include "adt/fs.hpp"
#include "adt/gemba.hpp"
#include "adt/grounding.hpp"
#include "adt/human_eval.hpp"
#include "adt/metrics.hpp"
#include "adt/pricing.hpp"
#include "adt/service.hpp"
#include "adt/srt.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "service_harness.hpp"

namespace {

using namespace adt;
using Clock = std::chrono::steady_clock;

// Collects failed expectations of one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::fabs(got - want) <= tol, s.str());
  }
};

int g_failed = 0;

void criterion(const std::string& name, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_s > 0 && secs > limit_s) {
    c.failures.push_back("runtime " + std::to_string(secs) + " s exceeds " + std::to_string(limit_s) + " s");
  }
  const bool ok = c.failures.empty();
  if (!ok) ++g_failed;
  std::printf("%s  %-28s %8.3f s", ok ? "PASS" : "FAIL", name.c_str(), secs);
  for (const auto& f : c.failures) std::printf("\n      %s", f.c_str());
  std::printf("\n");
  std::fflush(stdout);
}

void pricing(Check& c) {
  const auto sheet = PricingSheet::defaults();
  auto est = [&](Modality m, const std::string& model) {
    CostInputs in;
    in.n_segments = 190;
    in.modality = m;
    in.avg_prompt_tokens = 60;
    in.avg_output_tokens = 20;
    in.tokens_per_multimodal_call = 4500;
    return estimate_cost(in, sheet, model);
  };
  const auto a = est(Modality::kTextOnly, "gpt-4o");
  const auto b = est(Modality::kTextPlusFrames, "gpt-4o");
  const auto t = est(Modality::kTextOnly, "gpt-4-turbo");
  const auto u = est(Modality::kTextPlusFrames, "gpt-4-turbo");
  c.expect(a.format() == "input $0.06, output $0.06, total $0.11", "gpt-4o text: " + a.format());
  c.expect(b.format().find("total $4.33") != std::string::npos, "gpt-4o frames: " + b.format());
  c.expect(t.format() == "input $0.11, output $0.11, total $0.23", "gpt-4-turbo text: " + t.format());
  c.expect(u.format().find("total $8.66") != std::string::npos, "gpt-4-turbo frames: " + u.format());
}

void corpus_ratio(Check& c) {
  const auto entries = testing::german_row_fixture();
  const auto s = compute_stats(entries);
  c.expect(format_hms(s.video_ms) == "144:24:52", "video " + format_hms(s.video_ms));
  c.expect(format_hms(s.ad_ms) == "20:07:25", "ad " + format_hms(s.ad_ms));
  c.near(s.ratio * 100.0, 13.93, 0.01, "ratio percent");
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("seg-" + std::to_string(i));
  return out;
}

void split_sizing(Check& c) {
  for (auto [n, train] : {std::pair<std::size_t, std::size_t>{21672, 21272}, {7499, 7099}, {7508, 7108}}) {
    const auto input = ids(n);
    const auto first = split_corpus(input, 2024);
    c.expect(first.train.size() == train && first.dev.size() == 200 && first.test.size() == 200,
             std::to_string(n) + " -> " + std::to_string(first.train.size()) + "/" + std::to_string(first.dev.size()) +
                 "/" + std::to_string(first.test.size()));
    for (int run = 0; run < 2; ++run) {
      c.expect(split_corpus(input, 2024).to_json() == first.to_json(), "manifest differs across runs");
    }
  }
}

void metric_oracles(Check& c) {
  c.near(bleu({"the the the"}, {"the cat sat"}), 100.0 * std::cbrt(1.0 / 24.0), 0.01, "bleu clipped");
  c.near(bleu({"a b c d"}, {"a b c e"}), 100.0 * std::pow(1.0 / 8.0, 0.25), 0.01, "bleu smoothed");
  c.near(bleu({"a b"}, {"a b c d"}), 100.0 * std::exp(-1.0), 0.01, "bleu brevity");
  c.near(bleu({"a b", "c"}, {"a b", "d"}), 100.0 * std::sqrt(2.0 / 3.0), 0.01, "bleu corpus");
  c.near(bleu({"x y z"}, {"a b c"}), 0.0, 0.01, "bleu disjoint");
  c.near(bleu({"the cat sat on the mat", "a b"}, {"the cat sat on the mat", "a b"}), 100.0, 1e-9, "bleu identity");

  const auto f = [](double p, double r) { return 5.0 * p * r / (4.0 * p + r); };
  c.near(chrf({"abcd"}, {"abce"}), 100.0 * (0.75 + 2.0 / 3.0 + 0.5) / 4.0, 0.01, "chrf partial");
  c.near(chrf({"ab"}, {"abc"}), 100.0 * (f(1, 2.0 / 3.0) + f(1, 0.5)) / 2.0, 0.01, "chrf recall");
  c.near(chrf({"a b"}, {"ab"}), 100.0, 0.01, "chrf whitespace");
  c.near(chrf({"xyz"}, {"abc"}), 0.0, 0.01, "chrf disjoint");
  c.near(chrf({"ab", "c"}, {"ab", "d"}), 100.0 * (2.0 / 3.0 + 1.0) / 2.0, 0.01, "chrf corpus");
  c.near(chrf({"the cat sat", "Hallo"}, {"the cat sat", "Hallo"}), 100.0, 1e-9, "chrf identity");

  c.near(meteor_lite({"the cat sat"}, {"the cat sat"}), 100.0 * (1.0 - 0.5 / 27.0), 0.01, "meteor 3-token identity");
  c.near(meteor_lite({"cat"}, {"cat"}), 50.0, 0.01, "meteor 1-token identity");
  c.near(meteor_lite({"the cat sat"}, {"the cat sat on the mat"}), 100.0 * (5.0 / 9.5) * (1.0 - 0.5 / 27.0), 0.01,
         "meteor recall");
  c.near(meteor_lite({"sat cat the"}, {"the cat sat"}), 50.0, 0.01, "meteor fragmented");
  c.near(meteor_lite({"walking"}, {"walked"}), 50.0, 0.01, "meteor stem");
  c.near(meteor_lite({"dog"}, {"cat"}), 0.0, 0.01, "meteor disjoint");
}

void gemba_weighting(Check& c) {
  c.expect(severity_weight(Severity::kNone) == 0 && severity_weight(Severity::kMinor) == 1 &&
               severity_weight(Severity::kMajor) == 5 && severity_weight(Severity::kCritical) == 10,
           "severity weights");
  // 60 clean, 105 minor, 20 major, 15 critical: (105 + 100 + 150) / 200.
  std::vector<std::pair<std::string, std::string>> segs;
  for (int i = 0; i < 200; ++i) segs.push_back({"src-" + std::to_string(i), "hyp"});
  FunctionChatProvider provider([](const ChatRequest& req) {
    const int i = std::stoi(req.prompt.substr(req.prompt.rfind("```src-") + 7));
    ChatReply r;
    r.text = i < 60    ? "Critical:\nno-error\nMajor:\nno-error\nMinor:\nno-error"
             : i < 165 ? "Minor:\nfluency/punctuation - \"x\""
             : i < 185 ? "Major:\naccuracy/omission - \"y\""
                       : "Critical:\naccuracy/mistranslation - \"z\"";
    return r;
  });
  const auto res = gemba_mqm(segs, Language::kDe, Language::kEn, provider, GembaExemplars::defaults());
  c.near(res.mean_weight, 1.775, 1e-9, "designed mean");
  for (const auto& a : res.annotations) {
    c.expect(a.weight == 0 || a.weight == 1 || a.weight == 5 || a.weight == 10, "weight outside {0,1,5,10}");
  }
}

void kappa(Check& c) {
  const std::vector<int> a = {0, 6, 0, 6}, b = {6, 0, 6, 0};
  c.near(weighted_kappa(a, b).kappa, -1.0, 1e-9, "quadratic hand case");
  const std::vector<int> x = {0, 1, 2, 3}, y = {1, 1, 2, 3};
  c.near(weighted_kappa(x, y).kappa, 0.875, 1e-9, "quadratic hand case 2");

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> score(0, 6);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> p(30), q(30);
    for (auto& v : p) v = score(rng);
    for (auto& v : q) v = score(rng);
    p[0] = 0;
    p[1] = 5;
    c.near(weighted_kappa(p, p).kappa, 1.0, 1e-12, "identity");
    c.near(weighted_kappa(p, q).kappa, weighted_kappa(q, p).kappa, 1e-12, "symmetry");
  }
  std::vector<int> p(10000), q(10000);
  for (auto& v : p) v = score(rng);
  for (auto& v : q) v = score(rng);
  const double k = weighted_kappa(p, q).kappa;
  c.expect(std::fabs(k) < 0.05, "independent raters kappa " + std::to_string(k));
}

void windowing_sampling(Check& c) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10000; ++t) {
    const std::int64_t duration_ms = 1000 + static_cast<std::int64_t>(rng() % 10'000'000);
    const std::int64_t onset = static_cast<std::int64_t>(rng() % duration_ms);
    const std::int64_t offset = onset + static_cast<std::int64_t>(rng() % (duration_ms - onset + 1));
    const double buffer = static_cast<double>(rng() % 30000) / 1000.0;
    const auto seg = make_segment(1, Timecode::from_millis(onset), Timecode::from_millis(offset), "x");
    const auto w = compute_window(seg, duration_ms / 1000.0, buffer);
    const double want_start = std::max(0.0, onset / 1000.0 - buffer);
    const double want_end = std::min(duration_ms / 1000.0, offset / 1000.0 + buffer);
    c.expect(std::fabs(w.start_s - want_start) <= 0.001 && std::fabs(w.end_s - want_end) <= 0.001,
             "window mismatch at case " + std::to_string(t));
    c.expect(w.start_s >= 0.0 && w.end_s <= duration_ms / 1000.0, "window not clamped");

    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 5000);
    SamplerConfig fixed;
    fixed.k = 1 + static_cast<int>(rng() % 16);
    const auto idx = plan_indices(n, fixed);
    bool ok = static_cast<std::int64_t>(idx.size()) == std::min<std::int64_t>(fixed.k, n);
    for (std::size_t i = 1; i < idx.size(); ++i) ok = ok && idx[i - 1] < idx[i];
    if (fixed.k > 1) ok = ok && idx.front() == 0 && idx.back() == n - 1;
    ok = ok && idx.front() >= 0 && idx.back() <= n - 1;
    c.expect(ok, "fixed_k invariant broken for N=" + std::to_string(n) + " k=" + std::to_string(fixed.k));

    SamplerConfig stride;
    stride.mode = SamplingMode::kStride;
    stride.stride_frames = 1 + static_cast<int>(rng() % 200);
    const auto st = plan_indices(n, stride);
    c.expect(static_cast<std::int64_t>(st.size()) == (n - 1) / stride.stride_frames + 1,
             "stride length for N=" + std::to_string(n));
  }
}

void srt_round_trip(Check& c) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 10000; ++i) {
    const auto s = testing::random_script(rng);
    const auto text = serialize_script(s);
    const auto parsed = parse_script(text);
    c.expect(parsed == s, "structural mismatch at case " + std::to_string(i));
    c.expect(serialize_script(parsed) == text, "serialization mismatch at case " + std::to_string(i));
  }
  for (const char* name : {"german_cues.srt", "three_cues.srt"}) {
    const auto bytes = fs::read_file(testing::fixture(name));
    c.expect(serialize_script(parse_script(bytes)) == bytes, std::string("golden ") + name);
  }
  const auto sample = parse_script(fs::read_file(testing::fixture("german_cues.srt")));
  c.expect(sample.segments.size() == 3 && sample.segments[0].index == 7 &&
               sample.segments[0].onset.to_millis() == 73240,
           "sample cues");
}

// Translates every cue in both modalities and returns both exports.
std::string hermetic_run(Check& c) {
  testing::Harness h;
  const auto p = h.create();
  std::string out;
  for (Modality m : {Modality::kTextOnly, Modality::kTextPlusFrames}) {
    std::vector<std::string> jobs;
    for (const auto& seg : p.script.segments) {
      TranslateCommand cmd;
      cmd.target = Language::kDe;
      cmd.modality = m;
      jobs.push_back(h.service->translate_segment(make_segment_id(p.id, seg.index), cmd).id);
    }
    for (const auto& id : jobs) {
      const auto job = h.service->wait_job(id, std::chrono::seconds(10));
      c.expect(job.status == JobStatus::kDone, "job " + id + " " + std::string(job_status_name(job.status)));
    }
    const auto srt = h.service->export_script(p.id, Language::kDe, m);
    const auto parsed = parse_script(srt);
    c.expect(parsed.segments.size() == p.script.segments.size(), "exported cue count");
    for (std::size_t i = 0; i < parsed.segments.size() && i < p.script.segments.size(); ++i) {
      c.expect(parsed.segments[i].onset == p.script.segments[i].onset &&
                   parsed.segments[i].offset == p.script.segments[i].offset,
               "timecodes changed");
    }
    out += srt;
  }
  c.expect(h.mock.calls() == 6, "provider calls " + std::to_string(h.mock.calls()));
  return out;
}

void hermetic_e2e(Check& c) {
  const auto first = hermetic_run(c);
  const auto second = hermetic_run(c);
  c.expect(!first.empty() && first == second, "exports differ between runs");
}

Project crash_project(Store& store, int cues) {
  Project p;
  p.id = store.allocate_project_id();
  p.media_file = "media/clip.mp4";
  p.media_name = "clip.mp4";
  p.media = {25.0, 3600.0};
  for (int i = 0; i < cues; ++i) {
    p.script.segments.push_back(make_segment(static_cast<std::uint32_t>(i + 1), Timecode::from_millis(i * 5000),
                                             Timecode::from_millis(i * 5000 + 4000), "Cue text " + std::to_string(i)));
  }
  return p;
}

[[noreturn]] void crash_writer(const std::filesystem::path& root, unsigned seed) {
  Store store(root);
  std::mt19937 rng(seed);
  std::vector<Project> projects;
  for (;;) {
    if (projects.empty() || rng() % 3 == 0) {
      auto p = crash_project(store, 50 + static_cast<int>(rng() % 300));
      const auto staging = store.create_staging();
      std::filesystem::create_directories(staging / "media");
      fs::write_file_atomic(staging / "media" / "clip.mp4", std::string(4096, 'v'));
      store.commit_staging(staging, p);
      projects.push_back(std::move(p));
    } else if (rng() % 2) {
      auto& p = projects[rng() % projects.size()];
      p.settings.buffer_s = static_cast<double>(rng() % 20);
      store.save_project(p);
    } else {
      const auto& p = projects[rng() % projects.size()];
      store.append_rating(p.id, {"r", make_segment_id(p.id, 1), 1, 2, 3, {}});
    }
  }
}

void crash_safety(Check& c) {
  testing::TempDir dir;
  std::mt19937 rng(3);
  std::size_t bad = 0;
  std::size_t docs = 0;
  for (int round = 0; round < 50; ++round) {
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) crash_writer(dir.path(), static_cast<unsigned>(round));
    std::this_thread::sleep_for(std::chrono::microseconds(2000 + rng() % 30000));
    ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);

    Store store(dir.path());
    docs = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
      if (!e.is_regular_file() || e.path().extension() != ".json") continue;
      ++docs;
      if (!nlohmann::json::accept(fs::read_file(e.path()))) ++bad;
    }
    for (const auto& id : store.list_projects()) {
      try {
        store.load_project(id);
        store.load_ratings(id);
      } catch (const std::exception&) {
        ++bad;
      }
    }
  }
  c.expect(bad == 0, std::to_string(bad) + " unparseable documents");
  c.expect(docs > 0, "no documents written");
}

}  // namespace

int main() {
  criterion("pricing reproduction", 1.0, pricing);
  criterion("corpus ratio", 1.0, corpus_ratio);
  criterion("split sizing", 0.0, split_sizing);
  criterion("metric oracles", 0.0, metric_oracles);
  criterion("gemba weighting", 0.0, gemba_weighting);
  criterion("kappa", 10.0, kappa);
  criterion("windowing/sampling", 30.0, windowing_sampling);
  criterion("srt round-trip", 0.0, srt_round_trip);
  criterion("hermetic end-to-end", 10.0, hermetic_e2e);
  criterion("crash safety", 0.0, crash_safety);
  std::printf("%d of 10 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
