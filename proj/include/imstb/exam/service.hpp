#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "imstb/exam/model.hpp"
#include "imstb/hss/profile.hpp"
#include "imstb/xdms/store.hpp"

namespace imstb::exam {

enum class JobAction { OpenAndDeliver, CloseAndGrade };
std::string_view to_string(JobAction a);

struct ScheduledJob {
  net::Instant fire_at{0};
  std::string exam_id;
  JobAction action = JobAction::OpenAndDeliver;

  // Fire order: time, then exam_id.
  auto operator<=>(const ScheduledJob&) const = default;
};

enum class DeliveryStatus { Pending, Delivered, Undeliverable };
std::string_view to_string(DeliveryStatus s);

struct DeliveryEntry {
  DeliveryStatus status = DeliveryStatus::Pending;
  int code = 0;  // final SIP status, 408 on timeout
};
/// Keyed by recipient AOR.
using DeliveryReport = std::map<std::string, DeliveryEntry>;

/// Outbound instant messages; the AS SIP node implements this.
class Messenger {
 public:
  virtual ~Messenger() = default;
  /// `done` receives the final status code of the MESSAGE transaction.
  virtual void send_message(const std::string& aor, std::string_view content_type, std::string body,
                            std::function<void(int)> done) = 0;
};

struct Credential {
  std::string user;  // AOR
  std::set<hss::Role> roles;
  bool has(hss::Role r) const { return roles.contains(r); }
};

struct PublishReport {
  DeliveryReport students;
  DeliveryReport teacher;
};

/// Exam lifecycle: provisioning, scheduling, delivery, submission, grading and
/// result notification. Single threaded; callers serialise access.
class ExamService {
 public:
  ExamService(xdms::DocumentStore& docs, Messenger& messenger);

  /// Returns the exam_id (generated when the spec leaves it empty).
  std::string provision_exam(Exam spec, const Credential& teacher);
  /// Fires every job due at `now`, in order.
  std::vector<ScheduledJob> scheduler_tick(net::Instant now);
  std::optional<net::Instant> next_fire_at() const;
  const std::set<ScheduledJob>& jobs() const { return jobs_; }

  const DeliveryReport& deliver_exam(const std::string& exam_id);
  void accept_submission(Submission submission);
  const PublishReport& publish_results(const std::string& exam_id);

  const Exam& exam(const std::string& exam_id) const;
  const std::map<std::string, Exam>& exams() const { return exams_; }
  bool is_member(const Exam& exam, std::string_view aor);
  std::vector<std::string> members(const Exam& exam);

  /// Accepted submissions keyed by student AOR.
  const std::map<std::string, Submission>& submissions(const std::string& exam_id) const;
  /// Graded reports keyed by student AOR; includes non-submitting members.
  const std::map<std::string, GradeReport>& reports(const std::string& exam_id) const;
  const DeliveryReport& delivery(const std::string& exam_id) const;
  const PublishReport* published(const std::string& exam_id) const;

  /// Append-only record of provisioned exams and accepted submissions, one
  /// JSON object per line.
  const std::vector<std::string>& journal() const { return journal_; }
  void set_journal_path(std::filesystem::path path) { journal_path_ = std::move(path); }
  /// Rebuilds exams, submissions and pending jobs from journal lines.
  void replay(const std::vector<std::string>& lines);

  /// Notified whenever the job set changes so the owner can re-arm its timer.
  void set_schedule_listener(std::function<void()> fn) { on_schedule_ = std::move(fn); }

 private:
  struct Record {
    std::map<std::string, Submission> submissions;
    std::map<std::string, GradeReport> reports;
    DeliveryReport delivery;
    std::optional<PublishReport> published;
  };

  Exam& mutable_exam(const std::string& exam_id);
  void insert_exam(Exam exam);
  void close_and_grade(const std::string& exam_id);
  void append_journal(const nlohmann::json& entry);

  xdms::DocumentStore& docs_;
  Messenger& messenger_;
  std::map<std::string, Exam> exams_;
  std::map<std::string, Record> records_;
  std::set<ScheduledJob> jobs_;
  std::vector<std::string> journal_;
  std::optional<std::filesystem::path> journal_path_;
  std::function<void()> on_schedule_;
  std::uint64_t next_exam_ = 0;
};

}  // namespace imstb::exam
