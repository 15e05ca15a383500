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

#include <algorithm>
#include <thread>
#include <unordered_map>

#include "app_json.hpp"
#include "httplib.h"

namespace cubble {

namespace {

using app::json;

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

json selection_json(const Selection& s) {
  return json{{"group", s.group}, {"keys", s.keys}, {"source", s.source}, {"seq", s.seq}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Key text of a JSON key value; numbers are accepted for numeric keys.
std::string key_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return format_double(v.get<double>());
  throw Error("selection keys must be strings or numbers");
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, json{{"error", message}}, status);
}

/// Time bucket column rendered for JSON: month-of-year buckets as 1..12.
json bucket_json(const Column& c, std::size_t row, Bucket bucket) {
  if (bucket == Bucket::Month && !c.is_missing(row)) return civil_of(c.time(row)).month;
  if (bucket == Bucket::Year && !c.is_missing(row)) return civil_of(c.time(row)).year;
  return app::cell_json(c, row);
}

}  // namespace

// ---------------------------------------------------------------------------
// SelectionStore

UnknownKeysError::UnknownKeysError(std::vector<std::string> keys)
    : Error("unknown keys: " + join(keys)), keys_(std::move(keys)) {}

bool valid_selection_source(std::string_view source) {
  return source == "map" || source == "series" || source == "api";
}

SelectionStore::SelectionStore(std::set<std::string> known_keys) : known_(std::move(known_keys)) {}

Selection SelectionStore::get(const std::string& group) const {
  std::lock_guard lock(mu_);
  auto it = history_.find(group);
  if (it == history_.end() || it->second.empty()) return Selection{group, {}, "", 0};
  return it->second.back();
}

Selection SelectionStore::put(const std::string& group, const std::vector<std::string>& keys,
                              const std::string& source) {
  if (!valid_selection_source(source)) throw Error("selection source must be map, series or api");
  std::vector<std::string> unique;
  std::vector<std::string> unknown;
  for (const auto& k : keys) {
    if (std::find(unique.begin(), unique.end(), k) != unique.end()) continue;
    if (!known_.contains(k)) {
      if (std::find(unknown.begin(), unknown.end(), k) == unknown.end()) unknown.push_back(k);
    } else {
      unique.push_back(k);
    }
  }
  if (!unknown.empty()) throw UnknownKeysError(std::move(unknown));
  Selection s;
  {
    std::lock_guard lock(mu_);
    auto& h = history_[group];
    s = Selection{group, std::move(unique), source, h.empty() ? 1 : h.back().seq + 1};
    h.push_back(s);
  }
  cv_.notify_all();
  return s;
}

std::vector<Selection> SelectionStore::wait_after(const std::string& group, std::int64_t after,
                                                  std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  const auto newer = [&] {
    auto it = history_.find(group);
    return it != history_.end() && !it->second.empty() && it->second.back().seq > after;
  };
  cv_.wait_for(lock, timeout, [&] { return closed_ || newer(); });
  std::vector<Selection> out;
  if (closed_) return out;
  auto it = history_.find(group);
  if (it == history_.end()) return out;
  // seq starts at 1 and increases by one, so position = seq - 1.
  const auto& h = it->second;
  for (auto k = static_cast<std::size_t>(std::max<std::int64_t>(after, 0)); k < h.size(); ++k) out.push_back(h[k]);
  return out;
}

void SelectionStore::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool SelectionStore::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

// ---------------------------------------------------------------------------
// SelectionService

namespace {

std::set<std::string> key_set(const SpatialTable& s) {
  std::set<std::string> out;
  const Column& k = s.key_column();
  for (std::size_t i = 0; i < k.size(); ++i) out.insert(k.cell_text(i));
  return out;
}

}  // namespace

struct SelectionService::Impl {
  Impl(SpatialTable c, ServiceOptions o)
      : cubble(std::move(c)), temporal(face_temporal(cubble)), options(std::move(o)), store(key_set(cubble)) {
    const Column& keys = cubble.key_column();
    for (std::size_t i = 0; i < keys.size(); ++i) site_of.emplace(keys.cell_text(i), i);
    // Without SO_REUSEPORT a second instance on the same port fails to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });
    routes();
  }

  SpatialTable cubble;
  TemporalTable temporal;
  ServiceOptions options;
  SelectionStore store;
  std::unordered_map<std::string, std::size_t> site_of;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  std::vector<std::string> numeric_vars() const {
    std::vector<std::string> out;
    const Schema schema = cubble.ts_schema();
    for (std::size_t k = 1; k < schema.size(); ++k)
      if (schema[k].kind == Kind::Float64 || schema[k].kind == Kind::Int64) out.push_back(schema[k].name);
    return out;
  }

  json site_summary(std::size_t site) const {
    const Table& ts = cubble.ts(site);
    json s{{"n", ts.num_rows()}};
    if (ts.num_rows() > 0) {
      s["first"] = format_time(ts.column(0).time(0));
      s["last"] = format_time(ts.column(0).time(ts.num_rows() - 1));
    }
    for (const auto& v : numeric_vars()) {
      std::vector<double> vals;
      const Column& c = ts.column(v);
      for (std::size_t r = 0; r < c.size(); ++r)
        if (auto x = c.numeric(r)) vals.push_back(*x);
      json stats = json::object();
      for (AggFn f : {AggFn::Mean, AggFn::Min, AggFn::Max, AggFn::Var}) {
        const Scalar a = aggregate(f, vals);
        const double* d = std::get_if<double>(&a);
        stats[std::string(agg_name(f))] = d && std::isfinite(*d) ? json(*d) : json(nullptr);
      }
      s[v] = std::move(stats);
    }
    return s;
  }

  std::vector<Aggregation> aggregations(const std::vector<std::string>& vars, AggFn fn) const {
    std::vector<Aggregation> out;
    for (const auto& v : vars) out.push_back({v, fn, v});
    return out;
  }

  std::vector<std::string> requested_vars(const httplib::Request& req) const {
    if (!req.has_param("vars")) return {};
    auto vars = split_list(req.get_param_value("vars"));
    const Schema schema = cubble.ts_schema();
    for (const auto& v : vars) {
      bool found = false;
      for (std::size_t k = 1; k < schema.size(); ++k) found = found || schema[k].name == v;
      if (!found) throw std::invalid_argument("unknown variable '" + v + "'");
    }
    return vars;
  }

  void routes() {
    if (options.cors) {
      server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type, Last-Event-ID"}});
      server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    }

    server.Get("/sites", [this](const httplib::Request&, httplib::Response& res) {
      const Table spatial = cubble.spatial_columns();
      json out = json::array();
      for (std::size_t i = 0; i < spatial.num_rows(); ++i) {
        json row = app::row_json(spatial, i);
        row["summary"] = site_summary(i);
        out.push_back(std::move(row));
      }
      send_json(res, out);
    });

    server.Get(R"(/series/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string key = req.matches[1];
      auto it = site_of.find(key);
      if (it == site_of.end()) return send_error(res, 404, "unknown key '" + key + "'");
      std::vector<std::string> vars;
      try {
        vars = requested_vars(req);
      } catch (const std::invalid_argument& e) {
        return send_error(res, 400, e.what());
      }
      const std::string bucket = req.has_param("bucket") ? req.get_param_value("bucket") : "none";
      const Table& ts = cubble.ts(it->second);
      if (bucket == "none") {
        std::vector<std::string> cols{cubble.meta().index};
        if (vars.empty()) {
          cols = ts.names();
        } else {
          cols.insert(cols.end(), vars.begin(), vars.end());
        }
        return send_json(res, app::table_json(ts.select(cols)));
      }
      if (bucket != "month") return send_error(res, 400, "bucket must be none or month");
      const auto fn = parse_agg(req.has_param("agg") ? req.get_param_value("agg") : "mean");
      if (!fn) return send_error(res, 400, "unknown aggregation");
      if (vars.empty()) vars = numeric_vars();
      const auto one = filter_rows(temporal, [&](const RowView& r) { return r.table().column(0).cell_text(r.row()) == key; });
      try {
        const auto aggs = aggregations(vars, *fn);
        const TemporalTable summary = summarise_by(one, Bucket::YearMonth, aggs);
        send_json(res, app::table_json(summary.table().drop(std::vector<std::string>{cubble.meta().key})));
      } catch (const Error& e) {
        send_error(res, 400, e.what());
      }
    });

    server.Get("/summary", [this](const httplib::Request& req, httplib::Response& res) {
      const auto fn = parse_agg(req.has_param("agg") ? req.get_param_value("agg") : "mean");
      const auto bucket = parse_bucket(req.has_param("bucket") ? req.get_param_value("bucket") : "month");
      if (!fn) return send_error(res, 400, "unknown aggregation");
      if (!bucket) return send_error(res, 400, "unknown bucket");
      std::vector<std::string> vars;
      try {
        vars = requested_vars(req);
      } catch (const std::invalid_argument& e) {
        return send_error(res, 400, e.what());
      }
      if (vars.empty()) vars = numeric_vars();
      try {
        const TemporalTable s = summarise_by(temporal, *bucket, aggregations(vars, *fn));
        const Table& t = s.table();
        json out = json::array();
        for (std::size_t r = 0; r < t.num_rows(); ++r) {
          json row = app::row_json(t, r);
          row[t.column(1).name()] = bucket_json(t.column(1), r, *bucket);
          out.push_back(std::move(row));
        }
        send_json(res, out);
      } catch (const Error& e) {
        send_error(res, 400, e.what());
      }
    });

    server.Get(R"(/selection/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, selection_json(store.get(req.matches[1])));
    });

    server.Post(R"(/selection/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        return send_error(res, 400, "request body is not valid JSON");
      }
      if (!body.is_object() || !body.contains("keys") || !body["keys"].is_array())
        return send_error(res, 400, "body must be an object with a 'keys' array");
      const std::string source = body.value("source", "api");
      if (!valid_selection_source(source)) return send_error(res, 400, "source must be map, series or api");
      std::vector<std::string> keys;
      try {
        for (const auto& k : body["keys"]) keys.push_back(key_text(k));
        send_json(res, selection_json(store.put(req.matches[1], keys, source)));
      } catch (const UnknownKeysError& e) {
        send_json(res, json{{"error", "unknown keys"}, {"unknown", e.keys()}}, 422);
      } catch (const Error& e) {
        send_error(res, 400, e.what());
      }
    });

    server.Get(R"(/selection/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string group = req.matches[1];
      std::int64_t after = -1;
      try {
        if (req.has_header("Last-Event-ID")) after = std::stoll(req.get_header_value("Last-Event-ID"));
        if (req.has_param("after")) after = std::stoll(req.get_param_value("after"));
      } catch (const std::exception&) {
        return send_error(res, 400, "event id must be an integer");
      }
      // Without a resume point the stream opens with the current state.
      if (after < 0) after = std::max<std::int64_t>(store.get(group).seq - 1, 0);
      res.set_header("Cache-Control", "no-cache");
      auto last = std::make_shared<std::int64_t>(after);
      res.set_chunked_content_provider("text/event-stream", [this, group, last](std::size_t, httplib::DataSink& sink) {
        if (store.closed()) {
          sink.done();
          return false;
        }
        const auto events = store.wait_after(group, *last, std::chrono::milliseconds(250));
        std::string chunk;
        for (const auto& e : events) {
          chunk += "id: " + std::to_string(e.seq) + "\nevent: selection\ndata: " + selection_json(e).dump() + "\n\n";
          *last = e.seq;
        }
        if (chunk.empty()) chunk = ": keep-alive\n\n";
        return sink.write(chunk.data(), chunk.size());
      });
    });
  }
};

SelectionService::SelectionService(SpatialTable cubble, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(cubble), std::move(options))) {}

SelectionService::~SelectionService() { stop(); }

int SelectionService::bind() {
  auto& s = *impl_;
  if (s.options.port == 0) {
    s.port = s.server.bind_to_any_port(s.options.host);
  } else {
    s.port = s.server.bind_to_port(s.options.host, s.options.port) ? s.options.port : -1;
  }
  if (s.port < 0) throw Error("cannot bind " + s.options.host + ":" + std::to_string(s.options.port));
  return s.port;
}

void SelectionService::run() {
  if (impl_->port < 0) throw Error("bind() must be called before run()");
  impl_->server.listen_after_bind();
}

int SelectionService::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void SelectionService::stop() {
  if (!impl_) return;
  impl_->store.close();
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

SelectionStore& SelectionService::store() { return impl_->store; }

}  // namespace cubble
