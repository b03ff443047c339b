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

#include "tfn/serve.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"
#include "tfn/error.hpp"

namespace tfn::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

numkit::Vector read_features(const nlohmann::json& obj, const char* key,
                             std::size_t dim) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw InputError(std::string("request: missing array '") + key + "'");
  }
  if (it->size() != dim) {
    throw DimensionError(std::string(key) + ": expected " + std::to_string(dim) +
                         " values, found " + std::to_string(it->size()));
  }
  numkit::Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto& e = (*it)[i];
    if (!e.is_number()) {
      throw InputError(std::string(key) + "[" + std::to_string(i) +
                       "] is not a number");
    }
    v[i] = e.get<double>();
  }
  return v;
}

std::string summary_line(const char* name, const LatencySummary& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%s: mean %.3f ms  p50 %.3f ms  p95 %.3f ms  max %.3f ms\n",
                name, s.mean, s.p50, s.p95, s.max);
  return buf;
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

InferenceRequest parse_request(const std::string& line, std::size_t dim) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("request: malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw InputError("request: expected a JSON object");
  InferenceRequest req;
  if (const auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
    req.id = it->is_string() ? it->get<std::string>() : it->dump();
  }
  req.video = read_features(obj, "video", dim);
  req.audio = read_features(obj, "audio", dim);
  return req;
}

std::string format_response(const InferenceResponse& r) {
  nlohmann::ordered_json out;
  out["id"] = r.id ? nlohmann::ordered_json(*r.id) : nlohmann::ordered_json();
  out["probability"] = r.probability;
  out["label"] = r.fraud ? "fraud" : "legit";
  out["elapsed_ms"] = r.elapsed_ms;
  return out.dump();
}

std::string format_error(const std::string& message) {
  return nlohmann::ordered_json{{"error", message}}.dump();
}

LatencySummary summarize(std::vector<double> samples) {
  LatencySummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  const auto rank = [&](double q) {
    const auto r = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::max<std::size_t>(r, 1) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.max = samples.back();
  return s;
}

void LatencyStats::add(double forward_ms, double total_ms) {
  std::lock_guard lock(mu_);
  forward_.push_back(forward_ms);
  total_.push_back(total_ms);
}

LatencySummary LatencyStats::forward() const {
  std::lock_guard lock(mu_);
  return summarize(forward_);
}

LatencySummary LatencyStats::total() const {
  std::lock_guard lock(mu_);
  return summarize(total_);
}

std::string LatencyStats::report() const {
  const auto f = forward();
  std::string out = "requests served: " + std::to_string(f.count) + "\n";
  out += summary_line("forward latency", f);
  out += summary_line("request latency", total());
  return out;
}

InferenceEngine::InferenceEngine(model::ModelParams params, double threshold)
    : params_(std::move(params)), threshold_(threshold) {
  model::validate(params_);
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ParameterError("threshold must lie in (0, 1)");
  }
}

InferenceResponse InferenceEngine::infer(const InferenceRequest& req) const {
  InferenceResponse r;
  r.id = req.id;
  const auto start = Clock::now();
  r.probability = model::predict(params_, req.video, req.audio);
  r.elapsed_ms = ms_since(start);
  r.fraud = r.probability >= threshold_;
  return r;
}

std::optional<std::string> InferenceEngine::handle_line(
    const std::string& line, LatencyStats* stats) const {
  if (line.find_first_not_of(" \t\r") == std::string::npos) return std::nullopt;
  const auto start = Clock::now();
  try {
    const auto resp = infer(parse_request(line, input_dim()));
    std::string out = format_response(resp);
    if (stats) stats->add(resp.elapsed_ms, ms_since(start));
    return out;
  } catch (const Error& e) {
    return format_error(e.what());
  }
}

void serve_stream(const InferenceEngine& engine, std::istream& in,
                  std::ostream& out, LatencyStats& stats) {
  std::string line;
  while (std::getline(in, line)) {
    if (auto resp = engine.handle_line(line, &stats)) {
      out << *resp << '\n' << std::flush;
    }
  }
}

Transport parse_transport(const std::string& spec) {
  Transport t;
  if (spec == "stdio") return t;
  if (spec.rfind("tcp:", 0) != 0) {
    throw ConfigurationError("transport must be stdio or tcp:<port>, got '" +
                             spec + "'");
  }
  t.tcp = true;
  std::string rest = spec.substr(4);
  if (const auto colon = rest.rfind(':'); colon != std::string::npos) {
    t.host = rest.substr(0, colon);
    rest = rest.substr(colon + 1);
  }
  unsigned value = 0;
  const char* end = rest.data() + rest.size();
  const auto [ptr, ec] = std::from_chars(rest.data(), end, value);
  if (rest.empty() || ec != std::errc() || ptr != end || value > 65535) {
    throw ConfigurationError("transport: invalid port '" + rest + "'");
  }
  t.port = static_cast<std::uint16_t>(value);
  return t;
}

TcpServer::TcpServer(const InferenceEngine& engine, const std::string& host,
                     std::uint16_t port, LatencyStats& stats)
    : engine_(engine), stats_(stats) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw ConfigurationError("transport: invalid IPv4 address '" + host + "'");
  }
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw IoError("bind " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::handle(int fd) const {
  std::string pending;
  char buf[1 << 16];
  for (;;) {
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    pending.append(buf, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (auto nl = pending.find('\n'); nl != std::string::npos;
         nl = pending.find('\n', start)) {
      const auto resp = engine_.handle_line(pending.substr(start, nl - start), &stats_);
      start = nl + 1;
      if (resp && !send_all(fd, *resp + "\n")) return;
    }
    pending.erase(0, start);
  }
  // A final request without a trailing newline still gets an answer.
  if (const auto resp = engine_.handle_line(pending, &stats_)) {
    send_all(fd, *resp + "\n");
  }
}

void TcpServer::run(const std::atomic<bool>& stop) {
  // Handlers are detached; each closes its own socket and deregisters, so a
  // long-running server does not accumulate finished connections.
  struct Active {
    std::mutex mu;
    std::condition_variable idle;
    std::set<int> fds;
  } active;
  while (!stop.load()) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard lock(active.mu);
    active.fds.insert(fd);
    std::thread([this, fd, &active] {
      handle(fd);
      std::lock_guard inner(active.mu);
      active.fds.erase(fd);
      ::close(fd);
      active.idle.notify_all();
    }).detach();
  }
  std::unique_lock lock(active.mu);
  for (int fd : active.fds) ::shutdown(fd, SHUT_RDWR);
  active.idle.wait(lock, [&] { return active.fds.empty(); });
}

}  // namespace tfn::cli
