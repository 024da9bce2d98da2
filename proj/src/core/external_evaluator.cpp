#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cstring>
#include <thread>

#include "scdiff/errors.hpp"
#include "scdiff/evaluators.hpp"

extern char** environ;

namespace scdiff {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::unique_ptr<ExternalEvaluator> spawn_child(const std::vector<std::string>& argv,
                                               std::chrono::milliseconds timeout,
                                               auto&& make) {
  if (argv.empty() || argv.front().empty()) throw TransportError("external evaluator: empty command");
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw TransportError(std::string("socketpair: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, sv[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, sv[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  // Own process group so teardown also reaches grandchildren of a shell.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, &attr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  ::close(sv[1]);
  if (rc != 0) {
    ::close(sv[0]);
    throw TransportError("cannot launch '" + argv.front() + "': " + std::strerror(rc));
  }
  return make(static_cast<int>(pid), sv[0], timeout);
}

}  // namespace

ExternalEvaluator::ExternalEvaluator(int pid, int fd, std::chrono::milliseconds timeout)
    : pid_(pid), fd_(fd), timeout_(timeout) {}

std::unique_ptr<ExternalEvaluator> ExternalEvaluator::launch(std::vector<std::string> argv,
                                                             std::chrono::milliseconds timeout) {
  auto ev = spawn_child(argv, timeout, [](int pid, int fd, std::chrono::milliseconds t) {
    return std::unique_ptr<ExternalEvaluator>(new ExternalEvaluator(pid, fd, t));
  });

  // The child is owned by `ev` from here on; a failed handshake tears it down.
  const std::string line = ev->read_line(Clock::now() + timeout);
  json hello;
  try {
    hello = json::parse(line);
  } catch (const json::exception&) {
    throw TransportError("external evaluator handshake is not JSON: " + line.substr(0, 200));
  }
  if (!hello.is_object() || !hello.contains("hello") || !hello["hello"].is_object()) {
    throw TransportError("external evaluator handshake lacks a \"hello\" object");
  }
  const auto& h = hello["hello"];
  if (!h.contains("name") || !h["name"].is_string() || !h.contains("concurrent") ||
      !h["concurrent"].is_boolean()) {
    throw TransportError("external evaluator handshake needs string \"name\" and bool \"concurrent\"");
  }
  ev->name_ = "external:" + h["name"].get<std::string>();
  ev->concurrent_ = h["concurrent"].get<bool>();
  return ev;
}

std::unique_ptr<ExternalEvaluator> ExternalEvaluator::launch_shell(const std::string& command,
                                                                   std::chrono::milliseconds timeout) {
  return launch({"/bin/sh", "-c", command}, timeout);
}

ExternalEvaluator::~ExternalEvaluator() { shutdown_child(); }

void ExternalEvaluator::shutdown_child() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
  }
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int k = 0; k < 50 && !reaped; ++k) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        reaped = true;
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
    if (!reaped) {
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

std::string ExternalEvaluator::read_line(Clock::time_point deadline) {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) {
      broken_ = true;
      throw TransportError("external evaluator timed out after " + std::to_string(timeout_.count()) + " ms");
    }
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<std::int64_t>(left.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw TransportError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      broken_ = true;
      throw TransportError(std::string("recv: ") + std::strerror(errno));
    }
    if (n == 0) {
      broken_ = true;
      throw TransportError("external evaluator closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::uint64_t ExternalEvaluator::send(const EvalRequest& req) {
  if (broken_) throw TransportError("external evaluator connection is broken");
  const std::uint64_t id = next_id_++;
  const json msg = {{"id", id},
                    {"alpha", req.alpha},
                    {"beta", req.beta},
                    {"r", req.radius},
                    {"block", std::string(to_string(req.block))},
                    {"cx", req.center.cx},
                    {"cy", req.center.cy},
                    {"seed", req.seed},
                    {"prompt", req.prompt}};
  const std::string line = msg.dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw TransportError(std::string("send to external evaluator: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  return id;
}

EvalResult ExternalEvaluator::await(std::uint64_t id) {
  const auto start = Clock::now();
  const auto deadline = start + timeout_;
  std::string line;
  if (auto it = pending_.find(id); it != pending_.end()) {
    line = std::move(it->second);
    pending_.erase(it);
  } else {
    for (;;) {
      line = read_line(deadline);
      json probe;
      try {
        probe = json::parse(line);
      } catch (const json::exception&) {
        throw ContractError("external evaluator sent a non-JSON line: " + line.substr(0, 200));
      }
      if (!probe.is_object() || !probe.contains("id") || !probe["id"].is_number_unsigned()) {
        throw ContractError("external evaluator response lacks an unsigned \"id\"");
      }
      const auto got = probe["id"].get<std::uint64_t>();
      if (got == id) break;
      if (got >= next_id_) throw ContractError("external evaluator answered unknown id " + std::to_string(got));
      pending_[got] = line;
    }
  }

  const json msg = json::parse(line);
  if (msg.contains("error")) {
    throw EvaluationFailed("external evaluator error for request " + std::to_string(id) + ": " +
                           (msg["error"].is_string() ? msg["error"].get<std::string>() : msg["error"].dump()));
  }
  if (!msg.contains("s_text") || !msg["s_text"].is_number() || !msg.contains("s_img") ||
      !msg["s_img"].is_number()) {
    throw ContractError("external evaluator response " + std::to_string(id) +
                        " needs numeric s_text and s_img");
  }
  EvalResult r;
  r.s_text = msg["s_text"].get<double>();
  r.s_img = msg["s_img"].get<double>();
  r.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  r.evaluator_id = name_;
  return r;
}

EvalResult ExternalEvaluator::evaluate(const EvalRequest& request) { return await(send(request)); }

std::vector<EvalResult> ExternalEvaluator::evaluate_batch(std::span<const EvalRequest> requests) {
  if (!concurrent_) return Evaluator::evaluate_batch(requests);
  std::vector<std::uint64_t> ids;
  ids.reserve(requests.size());
  for (const auto& r : requests) ids.push_back(send(r));
  std::vector<EvalResult> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(await(id));
  return out;
}

}  // namespace scdiff
