#include "imstb/exam/service.hpp"

#include <algorithm>
#include <fstream>

#include "imstb/exam/content_types.hpp"

namespace imstb::exam {

std::string_view to_string(JobAction a) {
  return a == JobAction::OpenAndDeliver ? "OpenAndDeliver" : "CloseAndGrade";
}

std::string_view to_string(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Pending: return "Pending";
    case DeliveryStatus::Delivered: return "Delivered";
    case DeliveryStatus::Undeliverable: return "Undeliverable";
  }
  return "?";
}

namespace {

void record_outcome(DeliveryEntry& entry, int code) {
  entry.code = code;
  entry.status = code / 100 == 2 ? DeliveryStatus::Delivered : DeliveryStatus::Undeliverable;
}

}  // namespace

ExamService::ExamService(xdms::DocumentStore& docs, Messenger& messenger) : docs_(docs), messenger_(messenger) {}

const Exam& ExamService::exam(const std::string& exam_id) const {
  const auto it = exams_.find(exam_id);
  if (it == exams_.end()) throw ExamError(ExamErrc::UnknownExam, exam_id);
  return it->second;
}

Exam& ExamService::mutable_exam(const std::string& exam_id) { return const_cast<Exam&>(exam(exam_id)); }

std::vector<std::string> ExamService::members(const Exam& exam) {
  std::vector<std::string> out;
  try {
    for (const auto& uri : docs_.resolve_group(exam.group_uri)) out.push_back(uri.aor());
  } catch (const xdms::XdmError& e) {
    if (e.code() != xdms::XdmErrc::UnknownGroup && e.code() != xdms::XdmErrc::NotFound) throw;
  }
  return out;
}

bool ExamService::is_member(const Exam& exam, std::string_view aor) {
  const auto all = members(exam);
  return std::find(all.begin(), all.end(), aor) != all.end();
}

std::string ExamService::provision_exam(Exam spec, const Credential& teacher) {
  if (!teacher.has(hss::Role::Teacher)) throw ExamError(ExamErrc::NotTeacher, teacher.user);
  if (spec.exam_id.empty()) {
    do spec.exam_id = "exam-" + std::to_string(++next_exam_);
    while (exams_.contains(spec.exam_id));
  }
  if (exams_.contains(spec.exam_id)) throw ExamError(ExamErrc::ExamExists, spec.exam_id);
  spec.state = ExamState::Scheduled;
  spec.teacher = teacher.user;
  validate(spec);
  try {
    docs_.resolve_group(spec.group_uri);
  } catch (const xdms::XdmError&) {
    throw ExamError(ExamErrc::UnknownGroup, spec.group_uri.to_string());
  }

  // Only the redacted exam is published to the XDMS; the answer key stays with the AS.
  auto public_doc = redacted_json(spec);
  public_doc["open_at"] = spec.open_at.count();
  public_doc["group_uri"] = spec.group_uri.to_string();
  docs_.put_document({std::string(xdms::kExamDocs), teacher.user, spec.exam_id, std::string(kExamType),
                      public_doc.dump(), {}},
                     std::nullopt);

  append_journal({{"type", "exam"}, {"exam", spec}});
  const auto id = spec.exam_id;
  insert_exam(std::move(spec));
  return id;
}

void ExamService::insert_exam(Exam exam) {
  const auto id = exam.exam_id;
  if (exam.state == ExamState::Scheduled) jobs_.insert({exam.open_at, id, JobAction::OpenAndDeliver});
  if (exam.state == ExamState::Scheduled || exam.state == ExamState::Open)
    jobs_.insert({exam.close_at, id, JobAction::CloseAndGrade});
  exams_.insert_or_assign(id, std::move(exam));
  records_[id];
  if (on_schedule_) on_schedule_();
}

std::optional<net::Instant> ExamService::next_fire_at() const {
  if (jobs_.empty()) return std::nullopt;
  return jobs_.begin()->fire_at;
}

std::vector<ScheduledJob> ExamService::scheduler_tick(net::Instant now) {
  std::vector<ScheduledJob> fired;
  while (!jobs_.empty() && jobs_.begin()->fire_at <= now) {
    const auto job = *jobs_.begin();
    jobs_.erase(jobs_.begin());
    fired.push_back(job);
    if (job.action == JobAction::OpenAndDeliver) {
      mutable_exam(job.exam_id).state = ExamState::Open;
      append_journal({{"type", "state"}, {"exam_id", job.exam_id}, {"state", "Open"}});
      deliver_exam(job.exam_id);
    } else {
      close_and_grade(job.exam_id);
      publish_results(job.exam_id);
    }
  }
  if (!fired.empty() && on_schedule_) on_schedule_();
  return fired;
}

const DeliveryReport& ExamService::deliver_exam(const std::string& exam_id) {
  const auto& e = exam(exam_id);
  if (e.state != ExamState::Open) throw ExamError(ExamErrc::WrongState, exam_id + " is not Open");
  auto& report = records_[exam_id].delivery;
  const auto body = redacted_json(e).dump();
  for (const auto& aor : members(e)) {
    report[aor] = {};
    messenger_.send_message(aor, kExamType, body, [this, exam_id, aor](int code) {
      record_outcome(records_[exam_id].delivery[aor], code);
    });
  }
  return report;
}

void ExamService::accept_submission(Submission s) {
  const auto& e = exam(s.exam_id);
  if (e.state != ExamState::Open || s.submitted_at < e.open_at || s.submitted_at > e.close_at)
    throw ExamError(ExamErrc::ExamNotOpen, s.exam_id);
  if (!is_member(e, s.student)) throw ExamError(ExamErrc::NotAMember, s.student);
  auto& subs = records_[s.exam_id].submissions;
  if (subs.contains(s.student)) throw ExamError(ExamErrc::DuplicateSubmission, s.student);
  validate_answers(e, s.answers);
  append_journal({{"type", "submission"}, {"submission", s}});
  subs.emplace(s.student, std::move(s));
}

void ExamService::close_and_grade(const std::string& exam_id) {
  auto& e = mutable_exam(exam_id);
  e.state = ExamState::Closed;
  auto& rec = records_[exam_id];
  rec.reports.clear();
  for (const auto& [student, sub] : rec.submissions) rec.reports.emplace(student, grade(e, sub));
  for (const auto& aor : members(e))
    if (!rec.reports.contains(aor)) rec.reports.emplace(aor, no_submission_report(e, aor));
  e.state = ExamState::Graded;
  append_journal({{"type", "state"}, {"exam_id", exam_id}, {"state", "Graded"}});
}

const PublishReport& ExamService::publish_results(const std::string& exam_id) {
  const auto& e = exam(exam_id);
  auto& rec = records_[exam_id];
  if (e.state != ExamState::Graded || rec.published)
    throw ExamError(ExamErrc::WrongState, exam_id + (rec.published ? " already published" : " is not Graded"));
  rec.published.emplace();

  std::int64_t total = 0;
  for (const auto& [student, report] : rec.reports) {
    if (report.submitted) total += report.score;
    nlohmann::json body = report;
    body["kind"] = "result";
    rec.published->students[student] = {};
    messenger_.send_message(student, kResultType, body.dump(), [this, exam_id, student](int code) {
      record_outcome(records_[exam_id].published->students[student], code);
    });
  }
  const auto count = rec.submissions.size();
  const double mean = count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(count);
  const nlohmann::json summary = {{"kind", "summary"},  {"exam_id", exam_id},       {"count", count},
                                  {"mean", mean},       {"max_score", e.max_score()}, {"members", rec.reports.size()}};
  rec.published->teacher[e.teacher] = {};
  messenger_.send_message(e.teacher, kResultType, summary.dump(), [this, exam_id, teacher = e.teacher](int code) {
    record_outcome(records_[exam_id].published->teacher[teacher], code);
  });
  return *rec.published;
}

const std::map<std::string, Submission>& ExamService::submissions(const std::string& exam_id) const {
  exam(exam_id);
  return records_.at(exam_id).submissions;
}

const std::map<std::string, GradeReport>& ExamService::reports(const std::string& exam_id) const {
  exam(exam_id);
  return records_.at(exam_id).reports;
}

const DeliveryReport& ExamService::delivery(const std::string& exam_id) const {
  exam(exam_id);
  return records_.at(exam_id).delivery;
}

const PublishReport* ExamService::published(const std::string& exam_id) const {
  exam(exam_id);
  const auto& p = records_.at(exam_id).published;
  return p ? &*p : nullptr;
}

void ExamService::append_journal(const nlohmann::json& entry) {
  journal_.push_back(entry.dump());
  if (!journal_path_) return;
  std::ofstream out(*journal_path_, std::ios::app);
  out << journal_.back() << '\n';
  if (!out) throw std::runtime_error("cannot append to journal " + journal_path_->string());
}

void ExamService::replay(const std::vector<std::string>& lines) {
  for (const auto& line : lines) {
    const auto entry = nlohmann::json::parse(line);
    const auto type = entry.at("type").get<std::string>();
    if (type == "exam") {
      insert_exam(entry.at("exam").get<Exam>());
    } else if (type == "submission") {
      auto s = entry.at("submission").get<Submission>();
      records_[s.exam_id].submissions.insert_or_assign(s.student, s);
    } else if (type == "state") {
      const auto id = entry.at("exam_id").get<std::string>();
      auto& e = mutable_exam(id);
      if (entry.at("state") == "Open") {
        e.state = ExamState::Open;
        std::erase_if(jobs_, [&](const ScheduledJob& j) {
          return j.exam_id == id && j.action == JobAction::OpenAndDeliver;
        });
      } else {
        std::erase_if(jobs_, [&](const ScheduledJob& j) { return j.exam_id == id; });
        auto& rec = records_[id];
        rec.published.emplace();  // results went out before the restart
        e.state = ExamState::Closed;
        for (const auto& [student, sub] : rec.submissions) rec.reports.insert_or_assign(student, grade(e, sub));
        for (const auto& aor : members(e))
          if (!rec.reports.contains(aor)) rec.reports.emplace(aor, no_submission_report(e, aor));
        e.state = ExamState::Graded;
      }
    }
    journal_.push_back(line);
  }
  if (on_schedule_) on_schedule_();
}

}  // namespace imstb::exam
