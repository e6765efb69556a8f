#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "imstb/exam/service.hpp"
#include "imstb/hss/store.hpp"
#include "imstb/util/http.hpp"

namespace imstb::exam {

/// Passkey check returning the caller's identity and roles.
using Authenticator = std::function<std::optional<Credential>(const std::string& user, const std::string& passkey)>;

/// Authenticator backed by an HSS store (shared in process, loaded from file in live mode).
Authenticator hss_authenticator(const hss::HssStore& store);

/// JSON API over ExamService:
///   POST /api/login                       {user, passkey} -> {token}
///   POST /api/exams                       teacher; exam spec -> 201 {exam_id}
///   GET  /api/exams/{id}                  redacted for students until Graded
///   GET  /api/exams/active?student=aor    Open exams the student may take
///   POST /api/exams/{id}/submissions      student; {answers} -> 201
///   GET  /api/exams/{id}/results          404 until Graded
///   GET  /api/exams/{id}/report           teacher
class ExamHttpApi {
 public:
  using Clock = std::function<net::Instant()>;

  ExamHttpApi(ExamService& service, Authenticator auth, Clock clock);

  util::HttpResponse handle(const util::HttpRequest& req);

  /// Deterministic tokens for simulation runs; random ones otherwise.
  void use_counter_tokens(bool on) { counter_tokens_ = on; }

 private:
  util::HttpResponse login(const util::HttpRequest& req);
  util::HttpResponse create_exam(const Credential& who, const util::HttpRequest& req);
  util::HttpResponse get_exam(const Credential& who, const std::string& id);
  util::HttpResponse active(const Credential& who, const util::HttpRequest& req);
  util::HttpResponse submit(const Credential& who, const std::string& id, const util::HttpRequest& req);
  util::HttpResponse results(const Credential& who, const std::string& id);
  util::HttpResponse report(const Credential& who, const std::string& id);
  std::string new_token();

  ExamService& service_;
  Authenticator auth_;
  Clock clock_;
  std::map<std::string, Credential> tokens_;
  bool counter_tokens_ = false;
  std::uint64_t token_counter_ = 0;
};

/// HTTP status for a service error.
int http_status(ExamErrc e);

}  // namespace imstb::exam
