// Copyright 2026 The tfnfraud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tfn/model.hpp"

namespace tfn::cli {

struct InferenceRequest {
  std::optional<std::string> id;
  numkit::Vector video;
  numkit::Vector audio;
};

struct InferenceResponse {
  std::optional<std::string> id;
  double probability = 0.0;
  bool fraud = false;
  double elapsed_ms = 0.0;  // forward pass only
};

// Parses one JSON object with "video" and "audio" arrays of `dim` numbers
// and an optional string "id". Other members are ignored. Throws
// InputError / DimensionError.
InferenceRequest parse_request(const std::string& line, std::size_t dim);
std::string format_response(const InferenceResponse& r);
std::string format_error(const std::string& message);

struct LatencySummary {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// Nearest-rank percentiles over the recorded samples.
LatencySummary summarize(std::vector<double> samples_ms);

// Thread-safe latency log. `forward` covers the model evaluation alone,
// `total` also includes parsing and serialisation.
class LatencyStats {
 public:
  void add(double forward_ms, double total_ms);
  LatencySummary forward() const;
  LatencySummary total() const;
  std::string report() const;

 private:
  mutable std::mutex mu_;
  std::vector<double> forward_;
  std::vector<double> total_;
};

// Read-only model plus decision threshold; safe to share across threads.
class InferenceEngine {
 public:
  InferenceEngine(model::ModelParams params, double threshold);

  InferenceResponse infer(const InferenceRequest& req) const;

  // Handles one protocol line. Blank lines produce no response; malformed
  // requests produce an error object. Latencies of successful requests are
  // recorded in `stats` when given.
  std::optional<std::string> handle_line(const std::string& line,
                                         LatencyStats* stats) const;

  std::size_t input_dim() const { return params_.dims.input; }
  double threshold() const { return threshold_; }

 private:
  model::ModelParams params_;
  double threshold_;
};

// Serves newline-delimited requests until end of input.
void serve_stream(const InferenceEngine& engine, std::istream& in,
                  std::ostream& out, LatencyStats& stats);

// Parses "stdio", "tcp:<port>" or "tcp:<host>:<port>". Throws
// ConfigurationError otherwise. Port 0 asks the OS for a free port.
struct Transport {
  bool tcp = false;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};
Transport parse_transport(const std::string& spec);

// One thread per connection; requests on a connection are answered in order.
class TcpServer {
 public:
  // Binds and listens immediately. Throws IoError on failure.
  TcpServer(const InferenceEngine& engine, const std::string& host,
            std::uint16_t port, LatencyStats& stats);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }

  // Accepts connections until `stop` becomes true, then closes every
  // connection and joins its handler.
  void run(const std::atomic<bool>& stop);

 private:
  void handle(int fd) const;

  const InferenceEngine& engine_;
  LatencyStats& stats_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace tfn::cli
