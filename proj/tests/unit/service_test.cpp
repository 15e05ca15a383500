/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cubble/service.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include <gtest/gtest.h>

#include "cubble/csv.hpp"
#include "httplib.h"
#include "json.hpp"
#include "random_cubble.hpp"

namespace cubble {
namespace {

using json = nlohmann::json;
using namespace std::chrono_literals;

SpatialTable stations() {
  return make_cubble(read_csv(testing::fixture("stations.csv")), read_csv(testing::fixture("meteo.csv")), "id", "date",
                     {"long", "lat"})
      .cubble;
}

const std::set<std::string> kKeys{"ASN00086038", "ASN00086077", "ASN00086282"};

TEST(SelectionStore, PutGetAndSeq) {
  SelectionStore store(kKeys);
  EXPECT_EQ(store.get("g"), (Selection{"g", {}, "", 0}));
  const Selection a = store.put("g", {"ASN00086077", "ASN00086038", "ASN00086077"}, "map");
  EXPECT_EQ(a, (Selection{"g", {"ASN00086077", "ASN00086038"}, "map", 1}));
  EXPECT_EQ(store.put("g", {}, "series").seq, 2);
  EXPECT_EQ(store.get("g").keys, std::vector<std::string>{});
  EXPECT_EQ(store.put("other", {"ASN00086282"}, "api").seq, 1);
  EXPECT_EQ(store.get("g").seq, 2);
}

TEST(SelectionStore, RejectsWithoutMutating) {
  SelectionStore store(kKeys);
  store.put("g", {"ASN00086038"}, "map");
  try {
    store.put("g", {"ASN00086077", "nope", "also-nope", "nope"}, "map");
    FAIL();
  } catch (const UnknownKeysError& e) {
    EXPECT_EQ(e.keys(), (std::vector<std::string>{"nope", "also-nope"}));
  }
  EXPECT_THROW(store.put("g", {"ASN00086077"}, "keyboard"), Error);
  EXPECT_EQ(store.get("g"), (Selection{"g", {"ASN00086038"}, "map", 1}));
}

TEST(SelectionStore, WaitAfterReplaysAndTimesOut) {
  SelectionStore store(kKeys);
  EXPECT_TRUE(store.wait_after("g", 0, 10ms).empty());
  store.put("g", {"ASN00086038"}, "map");
  store.put("g", {"ASN00086077"}, "series");
  const auto all = store.wait_after("g", 0, 10ms);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].seq, 1);
  EXPECT_EQ(all[1].seq, 2);
  EXPECT_EQ(store.wait_after("g", 1, 10ms).size(), 1u);

  std::thread writer([&] {
    std::this_thread::sleep_for(50ms);
    store.put("g", {"ASN00086282"}, "api");
  });
  const auto woke = store.wait_after("g", 2, 5s);
  writer.join();
  ASSERT_EQ(woke.size(), 1u);
  EXPECT_EQ(woke[0].keys, std::vector<std::string>{"ASN00086282"});

  store.close();
  EXPECT_TRUE(store.closed());
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_TRUE(store.wait_after("g", 3, 5s).empty());
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 1s);
}

TEST(SelectionStore, ConcurrentWritersGetDistinctSeqs) {
  SelectionStore store(kKeys);
  constexpr int kWriters = 4, kWrites = 250;
  std::vector<std::thread> threads;
  std::vector<std::vector<std::int64_t>> seen(kWriters);
  for (int w = 0; w < kWriters; ++w)
    threads.emplace_back([&, w] {
      for (int i = 0; i < kWrites; ++i)
        seen[w].push_back(store.put("g", {i % 2 ? "ASN00086038" : "ASN00086077"}, "api").seq);
    });
  for (auto& t : threads) t.join();
  std::set<std::int64_t> all;
  for (const auto& s : seen) {
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
    all.insert(s.begin(), s.end());
  }
  EXPECT_EQ(all.size(), static_cast<std::size_t>(kWriters * kWrites));
  EXPECT_EQ(*all.rbegin(), kWriters * kWrites);
  EXPECT_EQ(store.get("g").seq, kWriters * kWrites);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<SelectionService>(stations(), ServiceOptions{"127.0.0.1", 0, true});
    port_ = service_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(5, 0);
  }
  void TearDown() override { service_->stop(); }

  json get(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expect) << path << ": " << res->body;
    EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
    return json::parse(res->body);
  }

  json post(const std::string& path, const std::string& body, int expect) {
    auto res = client_->Post(path, body, "application/json");
    EXPECT_TRUE(res);
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expect) << body << ": " << res->body;
    return json::parse(res->body);
  }

  std::unique_ptr<SelectionService> service_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(ServiceTest, Sites) {
  const json sites = get("/sites");
  ASSERT_EQ(sites.size(), 3u);
  EXPECT_EQ(sites[0]["id"], "ASN00086038");
  EXPECT_EQ(sites[0]["long"], 144.9066);
  EXPECT_FALSE(sites[0].contains("ts"));
  EXPECT_EQ(sites[0]["summary"]["n"], 10);
  EXPECT_EQ(sites[0]["summary"]["first"], "2020-01-01");
  EXPECT_EQ(sites[0]["summary"]["last"], "2020-01-10");
  EXPECT_TRUE(sites[0]["summary"]["tmax"].contains("mean"));
  EXPECT_TRUE(sites[0]["summary"]["tmax"].contains("var"));
}

TEST_F(ServiceTest, Series) {
  const json raw = get("/series/ASN00086038?vars=tmax");
  ASSERT_EQ(raw.size(), 10u);
  EXPECT_EQ(raw[0], (json{{"date", "2020-01-01"}, {"tmax", 26.8}}));
  EXPECT_EQ(get("/series/ASN00086038")[0].size(), 4u);

  const json monthly = get("/series/ASN00086077?vars=prcp,tmax&bucket=month&agg=max");
  ASSERT_EQ(monthly.size(), 1u);
  EXPECT_EQ(monthly[0]["yearmonth"], "2020-01");
  EXPECT_TRUE(monthly[0].contains("prcp"));

  get("/series/NOPE", 404);
  get("/series/ASN00086038?vars=nope", 400);
  get("/series/ASN00086038?bucket=fortnight", 400);
  get("/series/ASN00086038?bucket=month&agg=median", 400);
}

TEST_F(ServiceTest, Summary) {
  const json s = get("/summary?vars=tmax&agg=min");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0]["month"], 1);
  EXPECT_EQ(s[0]["id"], "ASN00086038");
  EXPECT_TRUE(s[0]["tmax"].is_number());
  const json y = get("/summary?bucket=year");
  EXPECT_EQ(y[0]["year"], 2020);
  get("/summary?bucket=century", 400);
  get("/summary?agg=mode", 400);
  get("/summary?vars=elev", 400);
}

TEST_F(ServiceTest, SelectionRoundTrip) {
  EXPECT_EQ(get("/selection/main"), (json{{"group", "main"}, {"keys", json::array()}, {"source", ""}, {"seq", 0}}));
  const json put = post("/selection/main", R"({"keys":["ASN00086282","ASN00086038"],"source":"map"})", 200);
  EXPECT_EQ(put["seq"], 1);
  EXPECT_EQ(put["keys"], (json{"ASN00086282", "ASN00086038"}));
  EXPECT_EQ(get("/selection/main"), put);
  EXPECT_EQ(post("/selection/main", R"({"keys":[]})", 200)["source"], "api");
  EXPECT_EQ(get("/selection/other")["seq"], 0);
}

TEST_F(ServiceTest, SelectionErrors) {
  const json unknown = post("/selection/main", R"({"keys":["ASN00086282","XYZ"]})", 422);
  EXPECT_EQ(unknown["unknown"], (json{"XYZ"}));
  post("/selection/main", "not json", 400);
  post("/selection/main", R"({"keys":"ASN00086282"})", 400);
  post("/selection/main", R"({"nokeys":[]})", 400);
  post("/selection/main", R"({"keys":[],"source":"keyboard"})", 400);
  post("/selection/main", R"({"keys":[{"a":1}]})", 400);
  EXPECT_EQ(get("/selection/main")["seq"], 0);
}

TEST_F(ServiceTest, Cors) {
  auto res = client_->Options("/selection/main");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

/// Reads SSE events until `want` selection events arrived or the deadline.
std::vector<json> read_events(int port, const std::string& path, std::size_t want,
                              const httplib::Headers& headers = {}) {
  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(5, 0);
  std::vector<json> events;
  std::string buffer;
  c.Get(path, headers, [&](const char* data, std::size_t n) {
    buffer.append(data, n);
    for (std::size_t end; (end = buffer.find("\n\n")) != std::string::npos;) {
      const std::string block = buffer.substr(0, end);
      buffer.erase(0, end + 2);
      const auto at = block.find("data: ");
      if (at != std::string::npos) events.push_back(json::parse(block.substr(at + 6)));
    }
    return events.size() < want;
  });
  return events;
}

TEST_F(ServiceTest, EventsStreamCurrentStateThenUpdates) {
  post("/selection/main", R"({"keys":["ASN00086038"],"source":"map"})", 200);
  std::thread writer([&] {
    std::this_thread::sleep_for(200ms);
    httplib::Client c("127.0.0.1", port_);
    c.Post("/selection/main", R"({"keys":["ASN00086077"],"source":"series"})", "application/json");
  });
  const auto events = read_events(port_, "/selection/main/events", 2);
  writer.join();
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0]["seq"], 1);
  EXPECT_EQ(events[0]["source"], "map");
  EXPECT_EQ(events[1]["seq"], 2);
  EXPECT_EQ(events[1]["keys"], (json{"ASN00086077"}));
}

TEST_F(ServiceTest, EventsResumeFromLastEventId) {
  for (int i = 0; i < 4; ++i) post("/selection/main", R"({"keys":["ASN00086038"]})", 200);
  const auto by_header = read_events(port_, "/selection/main/events", 2, {{"Last-Event-ID", "2"}});
  ASSERT_EQ(by_header.size(), 2u);
  EXPECT_EQ(by_header[0]["seq"], 3);
  EXPECT_EQ(by_header[1]["seq"], 4);
  const auto by_param = read_events(port_, "/selection/main/events?after=3", 1);
  ASSERT_EQ(by_param.size(), 1u);
  EXPECT_EQ(by_param[0]["seq"], 4);
  get("/selection/main/events?after=x", 400);
}

TEST_F(ServiceTest, StopEndsOpenStreams) {
  std::atomic<bool> finished{false};
  std::thread reader([&] {
    read_events(port_, "/selection/main/events", 1);
    finished = true;
  });
  std::this_thread::sleep_for(200ms);
  service_->stop();
  reader.join();
  EXPECT_TRUE(finished);
}

TEST(SelectionService, BindFailureThrows) {
  SelectionService a(stations(), {"127.0.0.1", 0, false});
  const int port = a.bind();
  SelectionService b(stations(), {"127.0.0.1", port, false});
  EXPECT_THROW(b.bind(), Error);
}

}  // namespace
}  // namespace cubble
