#include "imstb/exam/model.hpp"

#include <set>

namespace imstb::exam {

std::string_view to_string(ExamState s) {
  switch (s) {
    case ExamState::Draft: return "Draft";
    case ExamState::Scheduled: return "Scheduled";
    case ExamState::Open: return "Open";
    case ExamState::Closed: return "Closed";
    case ExamState::Graded: return "Graded";
  }
  return "?";
}

std::string_view to_string(SubmissionChannel c) {
  return c == SubmissionChannel::SipMessage ? "SipMessage" : "HttpApi";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Correct: return "Correct";
    case Verdict::Wrong: return "Wrong";
    case Verdict::Unanswered: return "Unanswered";
  }
  return "?";
}

std::string_view to_string(ExamErrc e) {
  switch (e) {
    case ExamErrc::NotTeacher: return "NotTeacher";
    case ExamErrc::UnknownGroup: return "UnknownGroup";
    case ExamErrc::InvalidSchedule: return "InvalidSchedule";
    case ExamErrc::InvalidExam: return "InvalidExam";
    case ExamErrc::UnknownExam: return "UnknownExam";
    case ExamErrc::WrongState: return "WrongState";
    case ExamErrc::ExamNotOpen: return "ExamNotOpen";
    case ExamErrc::NotAMember: return "NotAMember";
    case ExamErrc::DuplicateSubmission: return "DuplicateSubmission";
    case ExamErrc::MalformedAnswers: return "MalformedAnswers";
    case ExamErrc::ExamExists: return "ExamExists";
  }
  return "?";
}

namespace {

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& text, const Enum (&all)[N], const char* what) {
  for (auto e : all)
    if (to_string(e) == text) return e;
  throw nlohmann::json::type_error::create(302, std::string("unknown ") + what + " '" + text + "'", nullptr);
}

constexpr ExamState kStates[] = {ExamState::Draft, ExamState::Scheduled, ExamState::Open, ExamState::Closed,
                                 ExamState::Graded};
constexpr SubmissionChannel kChannels[] = {SubmissionChannel::SipMessage, SubmissionChannel::HttpApi};

}  // namespace

const Question* Exam::question(std::string_view qid) const {
  for (const auto& q : questions)
    if (q.qid == qid) return &q;
  return nullptr;
}

std::int64_t Exam::max_score() const {
  std::int64_t total = 0;
  for (const auto& q : questions) total += q.points;
  return total;
}

void validate(const Exam& exam) {
  if (exam.exam_id.empty()) throw ExamError(ExamErrc::InvalidExam, "empty exam_id");
  if (exam.open_at >= exam.close_at)
    throw ExamError(ExamErrc::InvalidSchedule, "open_at must precede close_at");
  if (exam.state != ExamState::Draft && exam.questions.empty())
    throw ExamError(ExamErrc::InvalidExam, "an exam needs questions once it leaves Draft");
  std::set<std::string> seen;
  for (const auto& q : exam.questions) {
    if (q.qid.empty() || !seen.insert(q.qid).second)
      throw ExamError(ExamErrc::InvalidExam, "empty or duplicate qid '" + q.qid + "'");
    if (q.choices.size() < 2) throw ExamError(ExamErrc::InvalidExam, q.qid + " needs at least two choices");
    if (q.correct_index < 0 || q.correct_index >= static_cast<int>(q.choices.size()))
      throw ExamError(ExamErrc::InvalidExam, q.qid + " correct_index out of range");
    if (q.points < 0) throw ExamError(ExamErrc::InvalidExam, q.qid + " has negative points");
  }
}

void validate_answers(const Exam& exam, const Answers& answers) {
  for (const auto& [qid, choice] : answers) {
    const auto* q = exam.question(qid);
    if (!q) throw ExamError(ExamErrc::MalformedAnswers, "unknown question " + qid);
    if (choice < 0 || choice >= static_cast<int>(q->choices.size()))
      throw ExamError(ExamErrc::MalformedAnswers, "choice out of range for " + qid);
  }
}

GradeReport grade(const Exam& exam, const Submission& submission) {
  GradeReport r{exam.exam_id, submission.student, {}, 0, exam.max_score(), true};
  for (const auto& q : exam.questions) {
    const auto it = submission.answers.find(q.qid);
    if (it == submission.answers.end()) {
      r.per_question[q.qid] = Verdict::Unanswered;
    } else if (it->second == q.correct_index) {
      r.per_question[q.qid] = Verdict::Correct;
      r.score += q.points;
    } else {
      r.per_question[q.qid] = Verdict::Wrong;
    }
  }
  return r;
}

GradeReport no_submission_report(const Exam& exam, const std::string& student) {
  GradeReport r{exam.exam_id, student, {}, 0, exam.max_score(), false};
  for (const auto& q : exam.questions) r.per_question[q.qid] = Verdict::Unanswered;
  return r;
}

nlohmann::json redacted_json(const Exam& exam) {
  auto questions = nlohmann::json::array();
  for (const auto& q : exam.questions)
    questions.push_back({{"qid", q.qid}, {"prompt", q.prompt}, {"choices", q.choices}});
  return {{"exam_id", exam.exam_id},
          {"title", exam.title},
          {"questions", questions},
          {"close_at", exam.close_at.count()}};
}

void to_json(nlohmann::json& j, const Question& q) {
  j = {{"qid", q.qid}, {"prompt", q.prompt}, {"choices", q.choices}, {"correct_index", q.correct_index},
       {"points", q.points}};
}

void from_json(const nlohmann::json& j, Question& q) {
  j.at("qid").get_to(q.qid);
  q.prompt = j.value("prompt", std::string());
  j.at("choices").get_to(q.choices);
  j.at("correct_index").get_to(q.correct_index);
  q.points = j.value("points", std::int64_t{1});
}

void to_json(nlohmann::json& j, const Exam& e) {
  j = {{"exam_id", e.exam_id},
       {"title", e.title},
       {"group_uri", e.group_uri.to_string()},
       {"questions", e.questions},
       {"open_at", e.open_at.count()},
       {"close_at", e.close_at.count()},
       {"state", to_string(e.state)},
       {"teacher", e.teacher}};
}

void from_json(const nlohmann::json& j, Exam& e) {
  e.exam_id = j.value("exam_id", std::string());
  e.title = j.value("title", std::string());
  const auto group = sip::SipUri::try_parse(j.at("group_uri").get<std::string>());
  if (!group) throw nlohmann::json::type_error::create(302, "group_uri is not a SIP URI", nullptr);
  e.group_uri = *group;
  j.at("questions").get_to(e.questions);
  e.open_at = net::Instant{j.at("open_at").get<std::int64_t>()};
  e.close_at = net::Instant{j.at("close_at").get<std::int64_t>()};
  e.state = enum_from(j.value("state", std::string("Draft")), kStates, "exam state");
  e.teacher = j.value("teacher", std::string());
}

void to_json(nlohmann::json& j, const Submission& s) {
  j = {{"exam_id", s.exam_id},
       {"student", s.student},
       {"answers", s.answers},
       {"submitted_at", s.submitted_at.count()},
       {"channel", to_string(s.channel)}};
}

void from_json(const nlohmann::json& j, Submission& s) {
  j.at("exam_id").get_to(s.exam_id);
  j.at("student").get_to(s.student);
  j.at("answers").get_to(s.answers);
  s.submitted_at = net::Instant{j.at("submitted_at").get<std::int64_t>()};
  s.channel = enum_from(j.at("channel").get<std::string>(), kChannels, "channel");
}

void to_json(nlohmann::json& j, const GradeReport& r) {
  auto per = nlohmann::json::object();
  for (const auto& [qid, v] : r.per_question) per[qid] = to_string(v);
  j = {{"exam_id", r.exam_id},     {"student", r.student},         {"per_question", per},
       {"score", r.score},         {"max_score", r.max_score},     {"submitted", r.submitted}};
}

}  // namespace imstb::exam
