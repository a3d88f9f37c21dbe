#include "adt/http_api.hpp"

#include "adt/codec.hpp"
#include "adt/text.hpp"

namespace adt {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw InputError("request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw InputError(std::string("request body is not valid JSON: ") + e.what());
  }
}

// Runs a handler and maps exceptions onto the error envelope.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const MissingTranslationsError& e) {
      send_json(res, HttpApi::status_for(e),
                HttpApi::envelope(e.code(), e.stage(), e.what(), {{"segment_ids", e.segment_ids()}}));
    } catch (const ParseError& e) {
      send_json(res, HttpApi::status_for(e), HttpApi::envelope(e.code(), e.stage(), e.what(), {{"line", e.line()}}));
    } catch (const Error& e) {
      send_json(res, HttpApi::status_for(e), HttpApi::envelope(e.code(), e.stage(), e.what()));
    } catch (const json::exception& e) {
      send_json(res, 400, HttpApi::envelope("input_error", "", std::string("bad request field: ") + e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, HttpApi::envelope("internal_error", "", e.what()));
    }
  };
}

std::optional<std::string> query(const httplib::Request& req, const std::string& key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

Language require_lang(const std::string& code) {
  auto lang = parse_language(code);
  if (!lang) throw InputError("unknown language '" + code + "'");
  return *lang;
}

}  // namespace

int HttpApi::status_for(const Error& e) {
  const auto& c = e.code();
  if (c == "not_found") return 404;
  if (c == "payload_too_large") return 413;
  if (c == "missing_translations") return 409;
  if (c == "parse_error" || c == "input_error" || c == "validation_error") return 400;
  if (c == "media_error") return 422;
  if (c == "transport_error" || c == "provider_error") return 502;
  return 500;
}

json HttpApi::envelope(const std::string& code, const std::string& stage, const std::string& message, json details) {
  return {{"code", code}, {"stage", stage}, {"message", message}, {"details", std::move(details)}};
}

json HttpApi::project_json(const Project& project) {
  json j = project;
  j["segment_count"] = project.script.segments.size();
  return j;
}

json HttpApi::segments_json(const std::vector<SegmentView>& segments) {
  json arr = json::array();
  for (const auto& v : segments) {
    json s = v.segment;
    s["segment_id"] = v.segment_id;
    s["warnings"] = v.warnings;
    arr.push_back(std::move(s));
  }
  return arr;
}

json HttpApi::job_json(const TranslationJob& job) { return job; }

json HttpApi::frames_json(const FramePreview& p, bool include_images) {
  json frames = json::array();
  for (std::size_t i = 0; i < p.indices.size(); ++i) {
    json f = {{"index", p.indices[i]}, {"timestamp_s", p.timestamps.at(i)}, {"mime", "image/jpeg"}};
    if (include_images) f["data_base64"] = text::base64_encode(p.images.at(i));
    frames.push_back(std::move(f));
  }
  return {{"job_id", p.job_id},
          {"window", p.window},
          {"moment", p.moment},
          {"grounding_fallback", p.grounding_fallback},
          {"frames", std::move(frames)}};
}

void HttpApi::install(httplib::Server& server) {
  // Leave room for multipart framing; the service enforces the exact limit.
  server.set_payload_max_length(options_.max_upload_bytes + (std::size_t{1} << 20));
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    std::string code = "http_error";
    if (res.status == 404) code = "not_found";
    if (res.status == 413) code = "payload_too_large";
    if (res.status == 400) code = "input_error";
    res.set_content(envelope(code, "", httplib::status_message(res.status)).dump(2) + "\n", kJson);
    return httplib::Server::HandlerResponse::Handled;
  });

  server.Post("/projects", guarded([this](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) throw InputError("expected multipart/form-data with 'video' and 'srt' parts");
    if (!req.has_file("video")) throw InputError("missing 'video' part");
    if (!req.has_file("srt")) throw InputError("missing 'srt' part");
    const auto video = req.get_file_value("video");
    const auto srt = req.get_file_value("srt");

    ProjectSettings settings = options_.default_settings;
    if (req.has_file("settings")) {
      json overrides;
      try {
        overrides = json::parse(req.get_file_value("settings").content);
      } catch (const json::exception& e) {
        throw InputError(std::string("settings part is not valid JSON: ") + e.what());
      }
      json merged = settings;
      merged.merge_patch(overrides);
      settings = merged.get<ProjectSettings>();
    }
    const Project project = service_.create_project({video.filename.empty() ? "video" : video.filename, video.content},
                                                    {srt.filename.empty() ? "script.srt" : srt.filename, srt.content},
                                                    settings);
    send_json(res, 201, project_json(project));
  }));

  server.Get(R"(/projects/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, project_json(service_.get_project(req.matches[1])));
  }));

  server.Get(R"(/projects/([^/]+)/segments)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, segments_json(service_.list_segments(req.matches[1])));
  }));

  server.Post(R"(/segments/([^/]+)/translate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    TranslateCommand cmd;
    cmd.target = require_lang(body.value("target_lang", std::string(language_code(options_.default_settings.default_target))));
    cmd.modality = parse_modality(body.value("modality", std::string("text_only")));
    if (body.contains("sampling")) {
      const auto mode = body["sampling"].get<std::string>();
      if (mode == "fixed_k") {
        cmd.frames.mode = SamplingMode::kFixedK;
      } else if (mode == "stride") {
        cmd.frames.mode = SamplingMode::kStride;
      } else {
        throw InputError("unknown sampling mode '" + mode + "'");
      }
    }
    if (body.contains("frames")) cmd.frames.k = body["frames"].get<int>();
    if (body.contains("stride_frames")) cmd.frames.stride_frames = body["stride_frames"].get<int>();
    if (body.contains("buffer_s")) cmd.frames.buffer_s = body["buffer_s"].get<double>();
    const auto job = service_.translate_segment(req.matches[1], cmd);
    send_json(res, 202, job_json(job));
  }));

  server.Get(R"(/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, job_json(service_.get_job(req.matches[1])));
  }));

  server.Get(R"(/segments/([^/]+)/frames)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto preview = service_.get_frames(req.matches[1], query(req, "job"));
    send_json(res, 200, frames_json(preview, query(req, "images").value_or("1") != "0"));
  }));

  server.Post(R"(/segments/([^/]+)/ratings)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    SqmRating rating;
    rating.rater_id = body.at("rater_id").get<std::string>();
    rating.fluency = body.at("fluency").get<int>();
    rating.adequacy = body.at("adequacy").get<int>();
    rating.usefulness = body.at("usefulness").get<int>();
    std::optional<std::string> job_id;
    if (body.contains("job_id")) job_id = body["job_id"].get<std::string>();
    send_json(res, 201, json(service_.submit_rating(req.matches[1], rating, job_id)));
  }));

  server.Post(R"(/segments/([^/]+)/post-edit)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string segment_id = req.matches[1];
    const Language lang = require_lang(body.at("lang").get<std::string>());
    const auto text = body.at("text").get<std::string>();
    service_.post_edit(segment_id, lang, text);
    send_json(res, 200, {{"segment_id", segment_id}, {"lang", language_code(lang)}, {"text", text}});
  }));

  server.Get(R"(/projects/([^/]+)/export)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto lang = query(req, "lang");
    if (!lang) throw InputError("missing 'lang' query parameter");
    std::optional<Modality> modality;
    if (auto m = query(req, "modality")) modality = parse_modality(*m);
    res.status = 200;
    res.set_content(service_.export_script(req.matches[1], require_lang(*lang), modality), "application/x-subrip");
  }));

  server.Get(R"(/projects/([^/]+)/ratings\.csv)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    res.status = 200;
    res.set_content(service_.ratings_csv(req.matches[1]), "text/csv");
  }));
}

}  // namespace adt
