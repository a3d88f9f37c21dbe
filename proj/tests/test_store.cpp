#include <gtest/gtest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <random>
#include <thread>

#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "adt/store.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace adt {
namespace {

using testing::TempDir;
namespace stdfs = std::filesystem;

Project sample_project(Store& store, int cues = 3) {
  Project p;
  p.id = store.allocate_project_id();
  p.media_file = "media/clip.mp4";
  p.media_name = "clip.mp4";
  p.media = {25.0, 12.0};
  for (int i = 0; i < cues; ++i) {
    p.script.segments.push_back(make_segment(static_cast<std::uint32_t>(i + 1), Timecode::from_millis(1000 + i * 3000),
                                             Timecode::from_millis(3000 + i * 3000), "Cue " + std::to_string(i + 1)));
  }
  p.warnings.push_back({4, 2, "overlap"});
  p.created_at = fs::utc_timestamp();
  p.settings.sampler.k = 6;
  return p;
}

void commit(Store& store, const Project& p) {
  const auto staging = store.create_staging();
  stdfs::create_directories(staging / "media");
  fs::write_file_atomic(staging / "media" / "clip.mp4", "STUBVIDEO fps=25/1 duration=12.0\n");
  store.commit_staging(staging, p);
}

TEST(SegmentIds, FormatAndSplit) {
  EXPECT_EQ(make_segment_id("prj-000001", 3), "prj-000001-3");
  EXPECT_EQ(split_segment_id("prj-000001-3"), (std::pair<std::string, std::uint32_t>{"prj-000001", 3}));
  EXPECT_THROW(split_segment_id("prj"), NotFoundError);
  EXPECT_THROW(split_segment_id("prj-000001-x"), NotFoundError);
  EXPECT_THROW(split_segment_id("-3"), NotFoundError);
}

TEST(Jobs, StatusTransitions) {
  TranslationJob job;
  job.id = "job-000001";
  EXPECT_TRUE(job.active());
  EXPECT_THROW(job.advance(JobStatus::kDone), Error);
  job.advance(JobStatus::kRunning);
  EXPECT_THROW(job.advance(JobStatus::kQueued), Error);
  EXPECT_THROW(job.advance(JobStatus::kDone), Error);  // no result
  job.result = TranslationResult{"Hallo", 1, 1, 0, 0, {}};
  job.advance(JobStatus::kDone);
  EXPECT_FALSE(job.active());
  EXPECT_THROW(job.advance(JobStatus::kFailed), Error);
  EXPECT_EQ(parse_job_status(job_status_name(JobStatus::kFailed)), JobStatus::kFailed);
  EXPECT_THROW(parse_job_status("paused"), InputError);
}

TEST(Store, ProjectRoundTrip) {
  TempDir dir;
  Store store(dir.path());
  const auto p = sample_project(store);
  EXPECT_EQ(p.id, "prj-000001");
  commit(store, p);
  EXPECT_TRUE(store.has_project(p.id));
  const auto loaded = store.load_project(p.id);
  EXPECT_EQ(loaded.script, p.script);
  EXPECT_EQ(loaded.media_file, p.media_file);
  EXPECT_EQ(loaded.settings.sampler.k, 6);
  EXPECT_EQ(loaded.warnings.size(), 1u);
  EXPECT_EQ(loaded.segment(2).clean_text, "Cue 2");
  EXPECT_THROW(loaded.segment(9), NotFoundError);
  EXPECT_TRUE(stdfs::exists(store.media_path(loaded)));
  EXPECT_EQ(store.list_projects(), (std::vector<std::string>{"prj-000001"}));
  EXPECT_THROW(store.load_project("prj-000999"), NotFoundError);
  EXPECT_THROW(store.load_project("../etc"), NotFoundError);
  EXPECT_THROW(commit(store, p), Error);
}

TEST(Store, JobRoundTripAndOrdering) {
  TempDir dir;
  Store store(dir.path());
  for (int i = 0; i < 3; ++i) {
    TranslationJob job;
    job.id = store.allocate_job_id(job.seq);
    job.project_id = "prj-000001";
    job.segment_id = "prj-000001-1";
    job.segment_index = 1;
    job.modality = Modality::kTextPlusFrames;
    job.target = Language::kFr;
    job.window = SearchWindow{1.0, 2.0, 10.0};
    job.moment = MomentCandidate{1.0, 2.0, 0.5};
    job.frame_indices = {0, 25};
    job.error = JobError{"media_error", "frames", "boom"};
    store.save_job(job);
  }
  const auto jobs = store.list_jobs();
  ASSERT_EQ(jobs.size(), 3u);
  EXPECT_EQ(jobs[0].id, "job-000001");
  EXPECT_EQ(jobs[2].seq, 3u);
  const auto j = store.load_job("job-000002");
  EXPECT_EQ(j.target, Language::kFr);
  EXPECT_EQ(j.modality, Modality::kTextPlusFrames);
  EXPECT_EQ(j.moment->score, 0.5);
  EXPECT_EQ(j.frame_indices, (std::vector<std::int64_t>{0, 25}));
  EXPECT_EQ(j.error->stage, "frames");
  EXPECT_THROW(store.load_job("job-000009"), NotFoundError);

  Store reopened(dir.path());
  std::uint64_t seq = 0;
  EXPECT_EQ(reopened.allocate_job_id(seq), "job-000004");
}

TEST(Store, RatingsAndPostEdits) {
  TempDir dir;
  Store store(dir.path());
  const auto p = sample_project(store);
  commit(store, p);
  EXPECT_TRUE(store.load_ratings(p.id).empty());
  store.append_rating(p.id, {"r1", "prj-000001-1", 5, 5, 5, Modality::kTextOnly});
  store.append_rating(p.id, {"r2", "prj-000001-1", 4, 4, 4, std::nullopt});
  EXPECT_EQ(store.load_ratings(p.id).size(), 2u);

  const auto key = Store::post_edit_key("prj-000001-1", Language::kDe);
  EXPECT_EQ(key, "prj-000001-1|de");
  store.set_post_edit(p.id, key, "Korrigiert");
  EXPECT_EQ(store.load_post_edits(p.id).at(key), "Korrigiert");
}

TEST(Store, ConcurrentRatingAppendsAreSerialized) {
  TempDir dir;
  Store store(dir.path());
  const auto p = sample_project(store);
  commit(store, p);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 10; ++i) store.append_rating(p.id, {"r" + std::to_string(t), std::to_string(i), 1, 2, 3, {}});
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(store.load_ratings(p.id).size(), 80u);
}

TEST(Store, StartupCleansLeftovers) {
  TempDir dir;
  {
    Store store(dir.path());
    commit(store, sample_project(store));
  }
  stdfs::create_directories(dir / "staging" / "999-1");
  fs::write_file_atomic(dir / "staging" / "999-1" / "project.json", "{");
  fs::write_file_atomic(dir / "projects" / "prj-000001" / "project.json.tmp.1.2.3", "{\"partial");
  Store store(dir.path());
  EXPECT_TRUE(stdfs::is_empty(dir / "staging"));
  EXPECT_FALSE(stdfs::exists(dir / "projects" / "prj-000001" / "project.json.tmp.1.2.3"));
  EXPECT_EQ(store.allocate_project_id(), "prj-000002");
}

TEST(Store, CorruptDocumentIsReported) {
  TempDir dir;
  Store store(dir.path());
  const auto p = sample_project(store);
  commit(store, p);
  fs::write_file_atomic(dir / "projects" / p.id / "project.json", "{\"id\": ");
  try {
    store.load_project(p.id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "store_error");
  }
}

// Every JSON document under the store parses, and every project loads.
std::size_t check_store(const stdfs::path& root) {
  Store store(root);
  std::size_t docs = 0;
  for (const auto& e : stdfs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    const auto body = fs::read_file(e.path());
    EXPECT_TRUE(nlohmann::json::accept(body)) << e.path();
    ++docs;
  }
  for (const auto& id : store.list_projects()) {
    EXPECT_NO_THROW(store.load_project(id)) << id;
    EXPECT_NO_THROW(store.load_ratings(id)) << id;
  }
  EXPECT_NO_THROW(store.list_jobs());
  return docs;
}

[[noreturn]] void write_forever(const stdfs::path& root, unsigned seed) {
  Store store(root);
  std::mt19937 rng(seed);
  std::vector<Project> projects;
  for (;;) {
    const int op = projects.empty() ? 0 : static_cast<int>(rng() % 4);
    if (op == 0) {
      auto p = sample_project(store, 20 + static_cast<int>(rng() % 200));
      commit(store, p);
      projects.push_back(std::move(p));
    } else if (op == 1) {
      auto& p = projects[rng() % projects.size()];
      p.settings.sampler.k = 1 + static_cast<int>(rng() % 10);
      store.save_project(p);
    } else if (op == 2) {
      const auto& p = projects[rng() % projects.size()];
      store.append_rating(p.id, {"r", make_segment_id(p.id, 1), 3, 3, 3, {}});
    } else {
      TranslationJob job;
      job.id = store.allocate_job_id(job.seq);
      job.project_id = projects.back().id;
      job.segment_id = make_segment_id(job.project_id, 1);
      job.segment_index = 1;
      store.save_job(job);
    }
  }
}

TEST(CrashSafety, KillDuringWrites) {
  TempDir dir;
  std::mt19937 rng(7);
  std::size_t docs = 0;
  for (int round = 0; round < 50; ++round) {
    const pid_t pid = ::fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) write_forever(dir.path(), static_cast<unsigned>(round));
    std::this_thread::sleep_for(std::chrono::microseconds(2000 + rng() % 30000));
    ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    ASSERT_TRUE(WIFSIGNALED(status));
    docs = check_store(dir.path());
  }
  EXPECT_GT(docs, 0u);
}

}  // namespace
}  // namespace adt
