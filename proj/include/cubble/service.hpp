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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "cubble/cubble.hpp"
#include "cubble/error.hpp"

namespace cubble {

struct Selection {
  std::string group;
  std::vector<std::string> keys;
  std::string source;  // map, series or api; empty before the first write
  std::int64_t seq = 0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

class UnknownKeysError : public Error {
 public:
  explicit UnknownKeysError(std::vector<std::string> keys);
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

bool valid_selection_source(std::string_view source);

/// Per-group selection state. Writes replace the key set and bump the
/// group's seq under one lock; waiters are woken on every write.
class SelectionStore {
 public:
  explicit SelectionStore(std::set<std::string> known_keys);

  Selection get(const std::string& group) const;

  /// Duplicate keys are dropped, first occurrence kept. Throws
  /// UnknownKeysError before touching any state.
  Selection put(const std::string& group, const std::vector<std::string>& keys, const std::string& source);

  /// Accepted writes with seq > `after`, oldest first. Blocks up to
  /// `timeout` when there are none yet; returns empty on timeout or close.
  std::vector<Selection> wait_after(const std::string& group, std::int64_t after,
                                    std::chrono::milliseconds timeout) const;

  /// Wakes every waiter; later waits return immediately.
  void close();
  bool closed() const;

 private:
  std::set<std::string> known_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::map<std::string, std::vector<Selection>> history_;
  bool closed_ = false;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool cors = false;
};

/// HTTP front end over an immutable cubble and a SelectionStore.
class SelectionService {
 public:
  SelectionService(SpatialTable cubble, ServiceOptions options);
  ~SelectionService();

  SelectionService(const SelectionService&) = delete;
  SelectionService& operator=(const SelectionService&) = delete;

  /// Binds the socket; returns the bound port. Throws Error on failure.
  int bind();
  /// Serves until stop(); call after bind().
  void run();
  /// Binds and serves on a background thread; returns the bound port.
  int start();
  void stop();

  SelectionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cubble
