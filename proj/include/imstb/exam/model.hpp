#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imstb/net/runtime.hpp"
#include "imstb/sip/uri.hpp"

namespace imstb::exam {

enum class ExamState { Draft, Scheduled, Open, Closed, Graded };
enum class SubmissionChannel { SipMessage, HttpApi };
enum class Verdict { Correct, Wrong, Unanswered };

std::string_view to_string(ExamState s);
std::string_view to_string(SubmissionChannel c);
std::string_view to_string(Verdict v);

enum class ExamErrc {
  NotTeacher,
  UnknownGroup,
  InvalidSchedule,
  InvalidExam,
  UnknownExam,
  WrongState,
  ExamNotOpen,
  NotAMember,
  DuplicateSubmission,
  MalformedAnswers,
  ExamExists,
};
std::string_view to_string(ExamErrc e);

class ExamError : public std::runtime_error {
 public:
  ExamError(ExamErrc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  ExamErrc code() const { return code_; }

 private:
  ExamErrc code_;
};

struct Question {
  std::string qid;
  std::string prompt;
  std::vector<std::string> choices;
  int correct_index = 0;
  // Integer points keep grading exact.
  std::int64_t points = 1;

  bool operator==(const Question&) const = default;
};

struct Exam {
  std::string exam_id;
  std::string title;
  sip::SipUri group_uri;
  std::vector<Question> questions;
  net::Instant open_at{0};
  net::Instant close_at{0};
  ExamState state = ExamState::Draft;
  std::string teacher;  // AOR of the provisioning teacher

  bool operator==(const Exam&) const = default;

  const Question* question(std::string_view qid) const;
  std::int64_t max_score() const;
};

using Answers = std::map<std::string, int>;

struct Submission {
  std::string exam_id;
  std::string student;  // AOR
  Answers answers;
  net::Instant submitted_at{0};
  SubmissionChannel channel = SubmissionChannel::SipMessage;

  bool operator==(const Submission&) const = default;
};

struct GradeReport {
  std::string exam_id;
  std::string student;
  std::map<std::string, Verdict> per_question;
  std::int64_t score = 0;
  std::int64_t max_score = 0;
  bool submitted = true;

  bool operator==(const GradeReport&) const = default;
};

/// Throws ExamError(InvalidExam or InvalidSchedule) when the exam breaks a
/// structural invariant. Questions may be empty only in Draft.
void validate(const Exam& exam);

/// Throws ExamError(MalformedAnswers) for unknown qids or out-of-range choices.
void validate_answers(const Exam& exam, const Answers& answers);

GradeReport grade(const Exam& exam, const Submission& submission);

/// Zero-score report for a group member who never submitted.
GradeReport no_submission_report(const Exam& exam, const std::string& student);

/// Delivery payload: {exam_id, title, questions:[{qid, prompt, choices}], close_at}.
nlohmann::json redacted_json(const Exam& exam);

void to_json(nlohmann::json& j, const Question& q);
void from_json(const nlohmann::json& j, Question& q);
void to_json(nlohmann::json& j, const Exam& e);
void from_json(const nlohmann::json& j, Exam& e);
void to_json(nlohmann::json& j, const Submission& s);
void from_json(const nlohmann::json& j, Submission& s);
void to_json(nlohmann::json& j, const GradeReport& r);

}  // namespace imstb::exam
