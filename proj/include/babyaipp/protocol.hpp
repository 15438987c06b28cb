#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "babyaipp/episode.hpp"

namespace babyaipp::protocol {

// Error codes carried in {"type":"error","error":{"code":...}}.
inline constexpr std::string_view kBadRequest = "bad_request";
inline constexpr std::string_view kNoEpisode = "no_episode";
inline constexpr std::string_view kEpisodeDone = "episode_done";
inline constexpr std::string_view kUnknownLevel = "unknown_level";
inline constexpr std::string_view kUnsatisfiableLevel = "unsatisfiable_level";
inline constexpr std::string_view kInternal = "internal";

inline constexpr std::uint16_t kDefaultPort = 7341;
inline constexpr const char* kPortEnvVar = "BABYAIPP_PORT";

// Port from $BABYAIPP_PORT, falling back to kDefaultPort.
std::uint16_t default_port();

std::string encode_observation(const Observation& obs);  // JSON object text
Observation decode_observation(std::string_view json_text);

// One connection's state: at most one live episode. Each request line gets
// exactly one response line.
class Session {
 public:
  explicit Session(std::vector<LevelSpec> levels = builtin_levels());

  std::string handle(std::string_view request_line);
  bool closed() const { return closed_; }
  const Episode* episode() const { return episode_ ? &*episode_ : nullptr; }

 private:
  std::vector<LevelSpec> levels_;
  std::optional<Episode> episode_;
  bool closed_ = false;
};

// Serves one session over a line stream until close or EOF.
void serve_stream(std::istream& in, std::ostream& out,
                  std::vector<LevelSpec> levels = builtin_levels());

// Thread-per-connection TCP server; every connection gets its own Session.
class TcpServer {
 public:
  explicit TcpServer(std::vector<LevelSpec> levels = builtin_levels());
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  // Binds and listens; port 0 picks a free port. Returns the bound port.
  std::uint16_t listen(const std::string& host, std::uint16_t port);
  // Accepts connections until stop().
  void run();
  // Runs the accept loop on a background thread.
  void start();
  void stop();
  std::uint16_t port() const { return port_; }

 private:
  std::vector<LevelSpec> levels_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
};

// Blocking line-oriented TCP client.
class TcpClient {
 public:
  TcpClient(const std::string& host, std::uint16_t port);
  ~TcpClient();
  TcpClient(const TcpClient&) = delete;
  TcpClient& operator=(const TcpClient&) = delete;

  // Sends one request line, returns the response line (without newline).
  std::string request(std::string_view line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace babyaipp::protocol
