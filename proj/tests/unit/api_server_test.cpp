#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "frameplan/service/api_server.hpp"
#include "test_support.hpp"

namespace frameplan::service {
namespace {

namespace fs = std::filesystem;

// Holds every completion for a while so model-backed routes outlive the pending threshold.
class SlowProvider final : public llm::Provider {
 public:
  explicit SlowProvider(std::chrono::milliseconds delay) : delay_(delay) {}
  llm::Completion complete(const llm::PromptBundle& bundle) override {
    std::this_thread::sleep_for(delay_);
    return inner_.complete(bundle);
  }
  std::string_view name() const override { return "slow"; }

 private:
  std::chrono::milliseconds delay_;
  llm::MockProvider inner_;
};

class ApiServerTest : public ::testing::Test {
 protected:
  void start(std::shared_ptr<llm::Provider> provider, ApiOptions options = {}) {
    dataDir = fs::temp_directory_path() / ("frameplan-api-" + std::to_string(::getpid()) + "-" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dataDir);
    auto service = std::make_shared<SessionService>(BundleCatalog(testing::bundle_root()), std::move(provider),
                                                    ServiceOptions{dataDir, true});
    server = std::make_unique<ApiServer>(service, options);
    port = server->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    thread = std::thread([this] { server->listen_after_bind(); });
    server->wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  void TearDown() override {
    if (server) server->stop();
    if (thread.joinable()) thread.join();
    fs::remove_all(dataDir);
  }

  std::string open(const std::string& bundle) {
    auto r = client->Post("/sessions", Json{{"bundle", bundle}}.dump(), "application/json");
    EXPECT_EQ(r->status, 201);
    return Json::parse(r->body).at("sessionId");
  }
  httplib::Result post(const std::string& path, const Json& body) {
    return client->Post(path, body.dump(), "application/json");
  }

  fs::path dataDir;
  std::unique_ptr<ApiServer> server;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
  int port = -1;
};

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::NotFound), 404);
  EXPECT_EQ(http_status(ErrorCode::RevisionConflict), 409);
  EXPECT_EQ(http_status(ErrorCode::OutOfBounds), 422);
  EXPECT_EQ(http_status(ErrorCode::UnknownObject), 422);
  EXPECT_EQ(http_status(ErrorCode::ProviderError), 502);
  EXPECT_EQ(http_status(ErrorCode::BadRequest), 400);
  const Json body = error_body(Error(ErrorCode::RevisionConflict, "stale", "4"));
  EXPECT_EQ(body, (Json{{"code", "RevisionConflict"}, {"message", "stale"}, {"detail", "4"}}));
}

TEST_F(ApiServerTest, HealthAndBundles) {
  start(std::make_shared<llm::MockProvider>());
  auto h = client->Get("/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(Json::parse(h->body).at("provider"), "mock");
  auto b = client->Get("/bundles");
  EXPECT_EQ(Json::parse(b->body).at("bundles").size(), testing::kDemoBundles.size());
}

TEST_F(ApiServerTest, EditingFlowAndErrorStatuses) {
  start(std::make_shared<llm::MockProvider>());
  const auto id = open("faucet-wash");
  auto r = post("/sessions/" + id + "/events", {{"revision", 0}, {"event", {{"type", "toggle"}, {"fixture", "faucet"}}}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(Json::parse(r->body).at("revision"), 1);

  r = post("/sessions/" + id + "/events", {{"revision", 0}, {"event", {{"type", "toggle"}, {"fixture", "faucet"}}}});
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(Json::parse(r->body).at("code"), "RevisionConflict");
  EXPECT_EQ(Json::parse(r->body).at("detail"), "1");

  r = post("/sessions/" + id + "/events", {{"event", {{"type", "drag"}, {"object", "orange_1"}, {"x", 5000}, {"y", 0}}}});
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(Json::parse(r->body).at("code"), "OutOfBounds");

  r = client->Post("/sessions/" + id + "/events", "{\"event\": ", "application/json");
  EXPECT_EQ(r->status, 400);
  r = post("/sessions/" + id + "/events", {{"revision", -3}, {"event", {{"type", "select"}, {"index", 0}}}});
  EXPECT_EQ(r->status, 400);

  EXPECT_EQ(client->Get("/sessions/nobody")->status, 404);
  EXPECT_EQ(post("/sessions", {{"bundle", "atlantis"}})->status, 404);
  EXPECT_EQ(post("/sessions", Json::object())->status, 400);

  // the model has no transcript: the provider failure is a gateway error
  r = post("/sessions/" + id + "/instruct", {{"text", "turn the faucet off"}});
  EXPECT_EQ(r->status, 502);
  EXPECT_EQ(Json::parse(r->body).at("code"), "TranscriptMissing");
}

TEST_F(ApiServerTest, SceneIsSvg) {
  start(std::make_shared<llm::MockProvider>());
  const auto id = open("red-apple");
  auto r = client->Get("/sessions/" + id + "/scene/0?mode=plain&width=320");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/svg+xml");
  EXPECT_NE(r->body.find("width=\"320\""), std::string::npos);
  EXPECT_EQ(client->Get("/sessions/" + id + "/scene/9")->status, 404);
  EXPECT_EQ(client->Get("/sessions/" + id + "/scene/0?mode=sepia")->status, 400);
}

TEST_F(ApiServerTest, TranslateArchiveAndJudge) {
  start(std::make_shared<llm::MockProvider>());
  const auto id = open("red-apple");
  post("/sessions/" + id + "/events", {{"event", {{"type", "drag"}, {"object", "red_apple"}, {"x", 440}, {"y", 300}}}});
  auto t = post("/sessions/" + id + "/translate", {{"path", "rule"}});
  ASSERT_EQ(t->status, 200);
  EXPECT_EQ(Json::parse(t->body).at("program"), "pick(\"red apple\")\nplace(\"white bowl\")\n");

  EXPECT_EQ(client->Put("/sessions/" + id + "/archive", "", "application/json")->status, 200);
  auto a = client->Get("/sessions/" + id + "/archive");
  ASSERT_EQ(a->status, 200);
  const Json archive = Json::parse(a->body);
  EXPECT_EQ(archive.at("format"), "frameplan.session/1");

  auto j = post("/judge", {{"session", id}, {"oracle", archive}});
  ASSERT_EQ(j->status, 200);
  EXPECT_TRUE(Json::parse(j->body).at("clean").get<bool>());
  EXPECT_EQ(post("/judge", {{"session", id}})->status, 400);

  auto copy = post("/sessions", {{"archive", archive}});
  EXPECT_EQ(copy->status, 201);
}

TEST_F(ApiServerTest, SlowModelCallsBecomeJobs) {
  start(std::make_shared<SlowProvider>(std::chrono::milliseconds(400)), ApiOptions{std::chrono::milliseconds(50)});
  const auto id = open("sorting-fruits");
  auto r = post("/sessions/" + id + "/predict", Json::object());
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 202);
  const std::string job = Json::parse(r->body).at("job");
  EXPECT_EQ(Json::parse(r->body).at("status"), "pending");

  httplib::Result polled;
  for (int i = 0; i < 100; ++i) {
    polled = client->Get("/jobs/" + job);
    if (polled->status != 202) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  // The job finishes with the provider's own error: nothing is canned for this prompt.
  EXPECT_EQ(polled->status, 502);
  EXPECT_EQ(Json::parse(polled->body).at("code"), "TranscriptMissing");
  EXPECT_EQ(client->Get("/jobs/" + job)->status, 404);  // results are collected once
  EXPECT_EQ(client->Get("/jobs/job-999")->status, 404);
}

TEST_F(ApiServerTest, FastCallsAnswerInline) {
  start(std::make_shared<SlowProvider>(std::chrono::milliseconds(0)), ApiOptions{std::chrono::milliseconds(2000)});
  const auto id = open("faucet-wash");
  auto r = post("/sessions/" + id + "/events", {{"event", {{"type", "toggle"}, {"fixture", "faucet"}}}});
  EXPECT_EQ(r->status, 200);
}

}  // namespace
}  // namespace frameplan::service
