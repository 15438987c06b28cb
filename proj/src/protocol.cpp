#include "babyaipp/protocol.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace babyaipp::protocol {

using json = nlohmann::ordered_json;

std::uint16_t default_port() {
  if (const char* env = std::getenv(kPortEnvVar)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 65536) return static_cast<std::uint16_t>(v);
  }
  return kDefaultPort;
}

namespace {

json observation_json(const Observation& obs) {
  json grid = json::array();
  for (auto v : obs.grid) grid.push_back(static_cast<int>(v));
  return {{"grid", grid}, {"descriptions", obs.descriptions}, {"instruction", obs.instruction}};
}

Observation observation_from(const json& j) {
  Observation obs;
  const auto& grid = j.at("grid");
  if (!grid.is_array() || grid.size() != kSymbolicGridSize)
    throw std::invalid_argument("observation grid must hold 147 integers");
  for (std::size_t i = 0; i < kSymbolicGridSize; ++i) {
    const int v = grid[i].get<int>();
    if (v < 0 || v > 255) throw std::invalid_argument("grid value out of range");
    obs.grid[i] = static_cast<std::uint8_t>(v);
  }
  obs.descriptions = j.at("descriptions").get<std::vector<std::string>>();
  obs.instruction = j.at("instruction").get<std::string>();
  return obs;
}

std::string error_response(std::string_view code, std::string_view message) {
  json j;
  j["type"] = "error";
  j["error"] = {{"code", code}, {"message", message}};
  return j.dump();
}

}  // namespace

std::string encode_observation(const Observation& obs) { return observation_json(obs).dump(); }

Observation decode_observation(std::string_view text) {
  try {
    return observation_from(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed observation: ") + e.what());
  }
}

Session::Session(std::vector<LevelSpec> levels) : levels_(std::move(levels)) {}

std::string Session::handle(std::string_view line) {
  json req;
  try {
    req = json::parse(line);
  } catch (const json::exception&) {
    return error_response(kBadRequest, "request is not valid JSON");
  }
  if (!req.is_object() || !req.contains("op") || !req["op"].is_string())
    return error_response(kBadRequest, "request needs a string field 'op'");
  const std::string op = req["op"].get<std::string>();

  if (op == "reset") {
    if (!req.contains("level") || !req["level"].is_string())
      return error_response(kBadRequest, "reset needs a string field 'level'");
    const auto mode = parse_mode(req.value("mode", std::string("train")));
    if (!mode) return error_response(kBadRequest, "mode must be 'train' or 'test'");
    const json seed = req.value("seed", json(0));
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
      return error_response(kBadRequest, "seed must be a non-negative integer");
    const auto text_mode = parse_text_mode(req.value("text_mode", std::string("descriptive")));
    if (!text_mode) return error_response(kBadRequest, "unknown text_mode");
    const std::string name = req["level"].get<std::string>();
    const LevelSpec* level = nullptr;
    for (const auto& l : levels_) {
      if (l.name == name) level = &l;
    }
    if (level == nullptr) return error_response(kUnknownLevel, "unknown level: " + name);
    try {
      episode_.emplace(Episode::reset(*level, *mode, seed.get<std::uint64_t>(), {*text_mode}));
    } catch (const UnsatisfiableLevel& e) {
      episode_.reset();
      return error_response(kUnsatisfiableLevel, e.what());
    }
    json resp;
    resp["type"] = "observation";
    resp["observation"] = observation_json(episode_->observation());
    return resp.dump();
  }

  if (op == "step") {
    if (!req.contains("action") || !req["action"].is_number_integer())
      return error_response(kBadRequest, "step needs an integer field 'action'");
    const auto action = action_from_id(req["action"].get<int>());
    if (!action) return error_response(kBadRequest, "action id must be in 0..6");
    if (!episode_) return error_response(kNoEpisode, "step before reset");
    if (episode_->terminated()) return error_response(kEpisodeDone, "episode already finished");
    const StepResult r = episode_->step(*action);
    json resp;
    resp["type"] = "step";
    resp["observation"] = observation_json(r.observation);
    resp["reward"] = r.reward;
    resp["done"] = r.done;
    resp["info"] = {{"time", r.info.time}, {"steps", r.info.steps},
                    {"outcome", to_string(r.info.outcome)}};
    return resp.dump();
  }

  if (op == "close") {
    closed_ = true;
    return json{{"type", "closed"}}.dump();
  }
  return error_response(kBadRequest, "unknown op: " + op);
}

void serve_stream(std::istream& in, std::ostream& out, std::vector<LevelSpec> levels) {
  Session session(std::move(levels));
  for (std::string line; !session.closed() && std::getline(in, line);) {
    if (line.empty()) continue;
    std::string resp;
    try {
      resp = session.handle(line);
    } catch (const std::exception& e) {
      resp = error_response(kInternal, e.what());
    }
    out << resp << '\n' << std::flush;
  }
}

namespace {

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

// Reads up to the next '\n'. Returns false on EOF/error with no full line.
bool read_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    const auto pos = buffer.find('\n');
    if (pos != std::string::npos) {
      line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

void serve_connection(int fd, std::vector<LevelSpec> levels) {
  Session session(std::move(levels));
  std::string buffer, line;
  while (!session.closed() && read_line(fd, buffer, line)) {
    if (line.empty()) continue;
    std::string resp;
    try {
      resp = session.handle(line);
    } catch (const std::exception& e) {
      resp = error_response(kInternal, e.what());
    }
    resp += '\n';
    if (!send_all(fd, resp)) break;
  }
  ::close(fd);
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (host.empty() || host == "0.0.0.0") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
    throw std::runtime_error("cannot resolve host " + host);
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

}  // namespace

TcpServer::TcpServer(std::vector<LevelSpec> levels) : levels_(std::move(levels)) {}

TcpServer::~TcpServer() { stop(); }

std::uint16_t TcpServer::listen(const std::string& host, std::uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = resolve(host, port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
    throw std::runtime_error(std::string("bind: ") + std::strerror(errno));
  if (::listen(listen_fd_, 64) < 0)
    throw std::runtime_error(std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  return port_;
}

void TcpServer::run() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    workers_.emplace_back(serve_connection, fd, levels_);
  }
}

void TcpServer::start() {
  accept_thread_ = std::thread([this] { run(); });
}

void TcpServer::stop() {
  stopping_ = true;
  if (accept_thread_.joinable()) accept_thread_.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  // Connections end when their clients hang up or send close.
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
}

TcpClient::TcpClient(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr = resolve(host, port);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    const std::string why = std::strerror(errno);
    ::close(fd_);
    throw std::runtime_error("connect: " + why);
  }
}

TcpClient::~TcpClient() {
  if (fd_ >= 0) ::close(fd_);
}

std::string TcpClient::request(std::string_view line) {
  std::string msg(line);
  msg += '\n';
  if (!send_all(fd_, msg)) throw std::runtime_error("send failed");
  std::string resp;
  if (!read_line(fd_, buffer_, resp)) throw std::runtime_error("connection closed by server");
  return resp;
}

}  // namespace babyaipp::protocol
