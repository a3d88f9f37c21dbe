#pragma once

// HTTP+JSON routes over a Service. Every error uses the envelope
// {"code", "stage", "message", "details"}.

#include <string>

#include "adt/error.hpp"
#include "adt/service.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adt {

struct HttpApiOptions {
  std::size_t max_upload_bytes = std::size_t{512} << 20;
  ProjectSettings default_settings;
};

class HttpApi {
 public:
  HttpApi(Service& service, HttpApiOptions options) : service_(service), options_(std::move(options)) {}

  void install(httplib::Server& server);

  static int status_for(const Error& e);
  static nlohmann::json envelope(const std::string& code, const std::string& stage, const std::string& message,
                                 nlohmann::json details = nlohmann::json::object());

  static nlohmann::json project_json(const Project& project);
  static nlohmann::json segments_json(const std::vector<SegmentView>& segments);
  static nlohmann::json job_json(const TranslationJob& job);
  static nlohmann::json frames_json(const FramePreview& preview, bool include_images);

 private:
  Service& service_;
  HttpApiOptions options_;
};

}  // namespace adt
