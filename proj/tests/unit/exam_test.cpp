#include <gtest/gtest.h>

#include <random>

#include "imstb/exam/content_types.hpp"
#include "imstb/exam/http_api.hpp"
#include "imstb/harness/testbed.hpp"

using namespace imstb;
using namespace imstb::exam;
using net::Instant;

namespace {

struct Sent {
  std::string aor;
  std::string type;
  std::string body;
  std::function<void(int)> done;
};

class FakeMessenger : public Messenger {
 public:
  std::vector<Sent> sent;
  void send_message(const std::string& aor, std::string_view type, std::string body,
                    std::function<void(int)> done) override {
    sent.push_back({aor, std::string(type), std::move(body), std::move(done)});
  }
  std::vector<Sent> of_type(std::string_view type) const {
    std::vector<Sent> out;
    for (const auto& s : sent)
      if (s.type == type) out.push_back(s);
    return out;
  }
};

Question q(std::string qid, int correct, std::int64_t points = 1, int n_choices = 3) {
  std::vector<std::string> choices;
  for (int i = 0; i < n_choices; ++i) choices.push_back("choice " + std::to_string(i));
  return {std::move(qid), "prompt", choices, correct, points};
}

Exam three_question_exam(std::string id = "e1", Instant open = Instant{60'000}, Instant close = Instant{660'000}) {
  Exam e;
  e.exam_id = std::move(id);
  e.title = "Networks";
  e.group_uri = sip::SipUri::parse("sip:cs101@ims.kau.test");
  e.questions = {q("q1", 0), q("q2", 1), q("q3", 0)};
  e.open_at = open;
  e.close_at = close;
  return e;
}

const Credential kTeacher{"teacher@ims.kau.test", {hss::Role::Teacher}};
const Credential kStudent{"s1@ims.kau.test", {hss::Role::Student}};

std::vector<std::string> users(int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back("s" + std::to_string(i));
  return out;
}

struct Rig {
  xdms::XdmStore docs;
  FakeMessenger messenger;
  ExamService service{docs, messenger};

  explicit Rig(int members = 10) {
    docs.put_document({"resource-lists", "teacher@ims.kau.test", "cs101", "",
                       harness::group_xml("sip:cs101@ims.kau.test", users(members)), {}},
                      std::nullopt);
  }

  Submission sub(std::string student, Answers a, Instant at = Instant{100'000},
                 SubmissionChannel ch = SubmissionChannel::SipMessage) {
    return {"e1", std::move(student), std::move(a), at, ch};
  }
};

ExamErrc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ExamError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected ExamError";
  return ExamErrc::InvalidExam;
}

// Independent scorer: walks the answers rather than the questions.
std::int64_t oracle_score(const std::vector<int>& key, const std::vector<std::int64_t>& points,
                          const std::map<int, int>& chosen) {
  std::int64_t s = 0;
  for (const auto& [idx, choice] : chosen)
    if (key[idx] == choice) s += points[idx];
  return s;
}

}  // namespace

TEST(GradeTest, PerQuestionEquality) {
  const auto e = three_question_exam();
  const auto r = grade(e, {"e1", "s1", {{"q1", 0}, {"q2", 1}, {"q3", 2}}, Instant{0}, {}});
  EXPECT_EQ(r.score, 2);
  EXPECT_EQ(r.max_score, 3);
  EXPECT_EQ(r.per_question.at("q3"), Verdict::Wrong);

  auto weighted = e;
  weighted.questions = {q("q1", 0, 2), q("q2", 1, 3), q("q3", 0, 5)};
  const auto all = grade(weighted, {"e1", "s1", {{"q1", 0}, {"q2", 1}, {"q3", 0}}, Instant{0}, {}});
  EXPECT_EQ(all.score, 10);
  EXPECT_EQ(all.max_score, 10);

  const auto partial = grade(e, {"e1", "s1", {{"q2", 1}}, Instant{0}, {}});
  EXPECT_EQ(partial.per_question.at("q1"), Verdict::Unanswered);
  EXPECT_EQ(partial.score, 1);
}

TEST(GradeTest, MatchesBruteForceOracleOnRandomSubmissions) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    Exam e = three_question_exam();
    e.questions.clear();
    std::vector<int> key;
    std::vector<std::int64_t> points;
    for (int i = 0; i < n; ++i) {
      const int choices = 2 + static_cast<int>(rng() % 4);
      key.push_back(static_cast<int>(rng() % choices));
      points.push_back(static_cast<std::int64_t>(rng() % 6));
      e.questions.push_back(q("q" + std::to_string(i), key.back(), points.back(), choices));
    }
    Answers answers;
    std::map<int, int> chosen;
    for (int i = 0; i < n; ++i) {
      if (rng() % 4 == 0) continue;  // unanswered
      const int c = static_cast<int>(rng() % e.questions[i].choices.size());
      answers["q" + std::to_string(i)] = c;
      chosen[i] = c;
    }
    const auto r = grade(e, {"e1", "s", answers, Instant{0}, {}});
    ASSERT_EQ(r.score, oracle_score(key, points, chosen)) << "trial " << trial;
    std::int64_t max = 0;
    for (auto p : points) max += p;
    ASSERT_EQ(r.max_score, max);
    ASSERT_LE(0, r.score);
    ASSERT_LE(r.score, r.max_score);
  }
}

TEST(ExamModelTest, ValidationRules) {
  auto e = three_question_exam();
  EXPECT_NO_THROW(validate(e));
  auto same = e;
  same.close_at = same.open_at;
  EXPECT_EQ(error_of([&] { validate(same); }), ExamErrc::InvalidSchedule);
  auto one_choice = e;
  one_choice.questions[0].choices.resize(1);
  EXPECT_EQ(error_of([&] { validate(one_choice); }), ExamErrc::InvalidExam);
  auto bad_key = e;
  bad_key.questions[1].correct_index = 3;
  EXPECT_EQ(error_of([&] { validate(bad_key); }), ExamErrc::InvalidExam);
  auto empty = e;
  empty.questions.clear();
  EXPECT_NO_THROW(validate(empty));  // Draft may be empty
  empty.state = ExamState::Scheduled;
  EXPECT_EQ(error_of([&] { validate(empty); }), ExamErrc::InvalidExam);
}

TEST(ExamModelTest, RedactionDropsTheKey) {
  const auto j = redacted_json(three_question_exam());
  EXPECT_EQ(j.dump().find("correct_index"), std::string::npos);
  EXPECT_EQ(j.dump().find("points"), std::string::npos);
  EXPECT_EQ(j["questions"].size(), 3u);
  EXPECT_EQ(j["close_at"], 660'000);
  const nlohmann::json full = three_question_exam();
  EXPECT_EQ(full.get<Exam>(), three_question_exam());
}

TEST(ExamServiceTest, ProvisionSchedulesTwoJobs) {
  Rig rig;
  const auto id = rig.service.provision_exam(three_question_exam(), kTeacher);
  EXPECT_EQ(id, "e1");
  EXPECT_EQ(rig.service.exam(id).state, ExamState::Scheduled);
  ASSERT_EQ(rig.service.jobs().size(), 2u);
  EXPECT_EQ(rig.service.jobs().begin()->action, JobAction::OpenAndDeliver);
  EXPECT_EQ(rig.service.next_fire_at(), Instant{60'000});
  const auto* doc = rig.docs.find("exam-docs", "teacher@ims.kau.test", "e1");
  ASSERT_NE(doc, nullptr);
  EXPECT_EQ(doc->body.find("correct_index"), std::string::npos);
  EXPECT_EQ(rig.service.journal().size(), 1u);
}

TEST(ExamServiceTest, ProvisionErrors) {
  Rig rig;
  EXPECT_EQ(error_of([&] { rig.service.provision_exam(three_question_exam(), kStudent); }), ExamErrc::NotTeacher);
  EXPECT_EQ(error_of([&] { rig.service.provision_exam(three_question_exam("x", Instant{5}, Instant{5}), kTeacher); }),
            ExamErrc::InvalidSchedule);
  auto other = three_question_exam("y");
  other.group_uri = sip::SipUri::parse("sip:nope@ims.kau.test");
  EXPECT_EQ(error_of([&] { rig.service.provision_exam(other, kTeacher); }), ExamErrc::UnknownGroup);
  rig.service.provision_exam(three_question_exam(), kTeacher);
  EXPECT_EQ(error_of([&] { rig.service.provision_exam(three_question_exam(), kTeacher); }), ExamErrc::ExamExists);
  EXPECT_TRUE(rig.service.jobs().size() == 2u);
}

TEST(ExamServiceTest, SchedulerFiresInOrderWithTies) {
  Rig rig;
  rig.service.provision_exam(three_question_exam("b"), kTeacher);
  rig.service.provision_exam(three_question_exam("a"), kTeacher);
  EXPECT_TRUE(rig.service.scheduler_tick(Instant{59'999}).empty());
  const auto fired = rig.service.scheduler_tick(Instant{60'000});
  ASSERT_EQ(fired.size(), 2u);
  EXPECT_EQ(fired[0].exam_id, "a");
  EXPECT_EQ(fired[1].exam_id, "b");
  EXPECT_EQ(rig.service.exam("a").state, ExamState::Open);
  EXPECT_EQ(rig.messenger.of_type(kExamType).size(), 20u);
  EXPECT_TRUE(rig.service.scheduler_tick(Instant{60'000}).empty());  // each job fires once
}

TEST(ExamServiceTest, DeliveryReportTracksOutcomes) {
  Rig rig;
  rig.service.provision_exam(three_question_exam(), kTeacher);
  rig.service.scheduler_tick(Instant{60'000});
  const auto exams = rig.messenger.of_type(kExamType);
  ASSERT_EQ(exams.size(), 10u);
  for (const auto& s : exams) {
    EXPECT_EQ(s.body.find("correct_index"), std::string::npos);
    s.done(s.aor == "s9@ims.kau.test" || s.aor == "s10@ims.kau.test" ? 480 : 200);
  }
  const auto& report = rig.service.delivery("e1");
  int delivered = 0;
  int undeliverable = 0;
  for (const auto& [aor, d] : report) {
    delivered += d.status == DeliveryStatus::Delivered;
    undeliverable += d.status == DeliveryStatus::Undeliverable;
  }
  EXPECT_EQ(delivered, 8);
  EXPECT_EQ(undeliverable, 2);
  EXPECT_EQ(report.at("s9@ims.kau.test").code, 480);
}

TEST(ExamServiceTest, DeliveryNeedsAnOpenExam) {
  Rig rig;
  rig.service.provision_exam(three_question_exam(), kTeacher);
  EXPECT_EQ(error_of([&] { rig.service.deliver_exam("e1"); }), ExamErrc::WrongState);
  EXPECT_TRUE(rig.messenger.sent.empty());
}

TEST(ExamServiceTest, EmptyGroupDeliversNothing) {
  Rig rig(0);
  rig.service.provision_exam(three_question_exam(), kTeacher);
  rig.service.scheduler_tick(Instant{60'000});
  EXPECT_TRUE(rig.service.delivery("e1").empty());
  EXPECT_EQ(rig.service.exam("e1").state, ExamState::Open);
}

TEST(ExamServiceTest, SubmissionRules) {
  Rig rig;
  rig.service.provision_exam(three_question_exam(), kTeacher);
  EXPECT_EQ(error_of([&] { rig.service.accept_submission(rig.sub("s1@ims.kau.test", {{"q1", 0}}, Instant{1})); }),
            ExamErrc::ExamNotOpen);
  rig.service.scheduler_tick(Instant{60'000});
  rig.service.accept_submission(rig.sub("s1@ims.kau.test", {{"q1", 0}}));
  EXPECT_EQ(error_of([&] { rig.service.accept_submission(rig.sub("s1@ims.kau.test", {{"q1", 1}})); }),
            ExamErrc::DuplicateSubmission);
  EXPECT_EQ(error_of([&] { rig.service.accept_submission(rig.sub("s11@ims.kau.test", {{"q1", 0}})); }),
            ExamErrc::NotAMember);
  EXPECT_EQ(error_of([&] { rig.service.accept_submission(rig.sub("s2@ims.kau.test", {{"q9", 0}})); }),
            ExamErrc::MalformedAnswers);
  EXPECT_EQ(error_of([&] { rig.service.accept_submission(rig.sub("s2@ims.kau.test", {{"q1", 3}})); }),
            ExamErrc::MalformedAnswers);
  EXPECT_EQ(error_of([&] { rig.service.accept_submission(rig.sub("s2@ims.kau.test", {}, Instant{700'000})); }),
            ExamErrc::ExamNotOpen);
  EXPECT_EQ(rig.service.submissions("e1").size(), 1u);
  EXPECT_EQ(rig.service.submissions("e1").at("s1@ims.kau.test").answers.at("q1"), 0);
}

TEST(ExamServiceTest, CloseGradesAndPublishes) {
  Rig rig;
  rig.service.provision_exam(three_question_exam(), kTeacher);
  rig.service.scheduler_tick(Instant{60'000});
  rig.service.accept_submission(rig.sub("s1@ims.kau.test", {{"q1", 0}, {"q2", 1}, {"q3", 2}}));  // 2
  rig.service.accept_submission(rig.sub("s2@ims.kau.test", {{"q1", 0}, {"q2", 1}, {"q3", 0}}));  // 3
  EXPECT_EQ(error_of([&] { rig.service.publish_results("e1"); }), ExamErrc::WrongState);
  rig.service.scheduler_tick(Instant{660'000});
  EXPECT_EQ(rig.service.exam("e1").state, ExamState::Graded);
  EXPECT_EQ(rig.service.reports("e1").size(), 10u);
  EXPECT_EQ(rig.service.reports("e1").at("s1@ims.kau.test").score, 2);
  EXPECT_FALSE(rig.service.reports("e1").at("s5@ims.kau.test").submitted);

  const auto results = rig.messenger.of_type(kResultType);
  ASSERT_EQ(results.size(), 11u);
  const auto summary = nlohmann::json::parse(results.back().body);
  EXPECT_EQ(results.back().aor, "teacher@ims.kau.test");
  EXPECT_EQ(summary["kind"], "summary");
  EXPECT_EQ(summary["count"], 2);
  EXPECT_DOUBLE_EQ(summary["mean"].get<double>(), 2.5);
  EXPECT_EQ(summary["max_score"], 3);
  EXPECT_EQ(error_of([&] { rig.service.publish_results("e1"); }), ExamErrc::WrongState);
}

TEST(ExamServiceTest, JournalReplayRestoresState) {
  Rig rig;
  rig.service.provision_exam(three_question_exam(), kTeacher);
  rig.service.scheduler_tick(Instant{60'000});
  rig.service.accept_submission(rig.sub("s1@ims.kau.test", {{"q1", 0}}));

  FakeMessenger quiet;
  ExamService restored(rig.docs, quiet);
  restored.replay(rig.service.journal());
  EXPECT_EQ(restored.exam("e1"), rig.service.exam("e1"));
  EXPECT_EQ(restored.submissions("e1"), rig.service.submissions("e1"));
  EXPECT_EQ(restored.jobs(), rig.service.jobs());
  EXPECT_TRUE(quiet.sent.empty());
}

// Duplicates interleaved across both channels: exactly one acceptance per student.
TEST(ExamServiceTest, SingleAcceptanceUnderRandomDuplicates) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Rig rig;
    rig.service.provision_exam(three_question_exam(), kTeacher);
    rig.service.scheduler_tick(Instant{60'000});
    std::map<std::string, int> accepted;
    for (int i = 0; i < 60; ++i) {
      const auto student = "s" + std::to_string(1 + rng() % 10) + "@ims.kau.test";
      const auto ch = rng() % 2 ? SubmissionChannel::SipMessage : SubmissionChannel::HttpApi;
      try {
        rig.service.accept_submission(rig.sub(student, {{"q1", static_cast<int>(rng() % 3)}}, Instant{100'000}, ch));
        ++accepted[student];
      } catch (const ExamError& e) {
        ASSERT_EQ(e.code(), ExamErrc::DuplicateSubmission);
      }
    }
    for (const auto& [student, n] : accepted) ASSERT_EQ(n, 1) << student;
    ASSERT_EQ(rig.service.submissions("e1").size(), accepted.size());
  }
}

TEST(ExamServiceTest, ChannelsGradeIdentically) {
  const Answers answers{{"q1", 0}, {"q2", 2}};
  std::vector<GradeReport> reports;
  for (auto ch : {SubmissionChannel::SipMessage, SubmissionChannel::HttpApi}) {
    Rig rig;
    rig.service.provision_exam(three_question_exam(), kTeacher);
    rig.service.scheduler_tick(Instant{60'000});
    rig.service.accept_submission(rig.sub("s1@ims.kau.test", answers, Instant{100'000}, ch));
    rig.service.scheduler_tick(Instant{660'000});
    reports.push_back(rig.service.reports("e1").at("s1@ims.kau.test"));
  }
  EXPECT_EQ(reports[0], reports[1]);
}

// ------------------------------------------------------------------ HTTP API

namespace {

struct ApiRig : Rig {
  hss::HssStore hss;
  Instant clock{0};
  ExamHttpApi api{service, hss_authenticator(hss), [this] { return clock; }};

  ApiRig() {
    hss.provision(harness::exam_subscriber("teacher", {hss::Role::Teacher}));
    for (int i = 1; i <= 11; ++i) hss.provision(harness::exam_subscriber("s" + std::to_string(i), {hss::Role::Student}));
  }

  util::HttpResponse call(std::string method, std::string path, std::string body = {},
                          std::optional<std::string> token = {}) {
    util::HttpRequest req{std::move(method), std::move(path), {}, {}, std::move(body)};
    if (const auto q = req.path.find('?'); q != std::string::npos) {
      const auto query = req.path.substr(q + 1);
      req.path.resize(q);
      const auto eq = query.find('=');
      req.query[query.substr(0, eq)] = query.substr(eq + 1);
    }
    if (token) req.headers["authorization"] = "Bearer " + *token;
    return api.handle(req);
  }

  std::string login(const std::string& user) {
    const auto passkey = "pass-" + user.substr(0, user.find('@'));
    const auto r = call("POST", "/api/login", nlohmann::json{{"user", user}, {"passkey", passkey}}.dump());
    EXPECT_EQ(r.status, 200) << r.body;
    return nlohmann::json::parse(r.body)["token"];
  }
};

}  // namespace

TEST(ExamHttpTest, LoginChecksThePasskey) {
  ApiRig rig;
  EXPECT_EQ(rig.call("POST", "/api/login", R"({"user":"s1","passkey":"wrong"})").status, 401);
  EXPECT_EQ(rig.call("POST", "/api/login", "nonsense").status, 400);
  const auto ok = rig.call("POST", "/api/login", R"({"user":"sip:s1@ims.kau.test","passkey":"pass-s1"})");
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(rig.call("GET", "/api/exams/e1").status, 401);
  EXPECT_EQ(rig.call("GET", "/api/exams/e1", "", "forged").status, 401);
}

TEST(ExamHttpTest, ExamLifecycleOverHttp) {
  ApiRig rig;
  const auto teacher = rig.login("teacher@ims.kau.test");
  const auto s1 = rig.login("s1@ims.kau.test");
  const nlohmann::json spec = three_question_exam();

  EXPECT_EQ(rig.call("POST", "/api/exams", spec.dump(), s1).status, 403);
  const auto created = rig.call("POST", "/api/exams", spec.dump(), teacher);
  ASSERT_EQ(created.status, 201) << created.body;
  EXPECT_EQ(nlohmann::json::parse(created.body)["exam_id"], "e1");
  EXPECT_EQ(rig.call("POST", "/api/exams", "{}", teacher).status, 400);
  auto bad = spec;
  bad["exam_id"] = "e2";
  bad["close_at"] = bad["open_at"];
  EXPECT_EQ(rig.call("POST", "/api/exams", bad.dump(), teacher).status, 400);

  const auto view = rig.call("GET", "/api/exams/e1", "", s1);
  EXPECT_EQ(view.status, 200);
  EXPECT_EQ(view.body.find("correct_index"), std::string::npos);
  EXPECT_NE(rig.call("GET", "/api/exams/e1", "", teacher).body.find("correct_index"), std::string::npos);
  EXPECT_EQ(rig.call("GET", "/api/exams/nope", "", s1).status, 404);

  const std::string answers = R"({"answers":{"q1":0,"q2":1}})";
  EXPECT_EQ(rig.call("POST", "/api/exams/e1/submissions", answers, s1).status, 403);  // not open yet
  rig.service.scheduler_tick(Instant{60'000});
  rig.clock = Instant{61'000};
  const auto active = nlohmann::json::parse(rig.call("GET", "/api/exams/active?student=s1@ims.kau.test", "", s1).body);
  ASSERT_EQ(active["exams"].size(), 1u);
  EXPECT_EQ(active.dump().find("correct_index"), std::string::npos);
  EXPECT_EQ(rig.call("GET", "/api/exams/active?student=s2@ims.kau.test", "", s1).status, 403);

  EXPECT_EQ(rig.call("POST", "/api/exams/e1/submissions", answers, s1).status, 201);
  EXPECT_EQ(rig.call("POST", "/api/exams/e1/submissions", answers, s1).status, 409);
  EXPECT_EQ(rig.call("POST", "/api/exams/e1/submissions", R"({"answers":{"q1":7}})", rig.login("s2@ims.kau.test"))
                .status,
            400);
  EXPECT_EQ(rig.call("POST", "/api/exams/e1/submissions", answers, rig.login("s11@ims.kau.test")).status, 403);
  EXPECT_EQ(rig.call("GET", "/api/exams/e1/results", "", s1).status, 404);
  EXPECT_EQ(rig.call("GET", "/api/exams/e1/report", "", s1).status, 403);

  rig.service.scheduler_tick(Instant{660'000});
  const auto mine = rig.call("GET", "/api/exams/e1/results", "", s1);
  ASSERT_EQ(mine.status, 200);
  EXPECT_EQ(nlohmann::json::parse(mine.body)["score"], 2);
  const auto report = nlohmann::json::parse(rig.call("GET", "/api/exams/e1/report", "", teacher).body);
  EXPECT_EQ(report["state"], "Graded");
  EXPECT_EQ(report["submissions"], 1);
  EXPECT_DOUBLE_EQ(report["mean"].get<double>(), 2.0);
}
