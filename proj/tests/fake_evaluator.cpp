// Stand-in for an external scorer. Speaks the newline-delimited JSON
// protocol on stdin/stdout.
//   fake_evaluator MODE [FIXTURE]
// MODE: normal | concurrent | silent | mute | bad-hello | bad-range | error |
//       crash | stray-id | slow
// FIXTURE: peak (default) | identity | infeasible

#include <unistd.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

using json = nlohmann::json;

namespace {

double s_text(double a, double b) {
  const double da = a - 4.2;
  const double db = b - 8.5;
  return 0.20 + 0.12 * std::exp(-da * da / 2.0) * std::exp(-db * db / 4.0);
}

double s_img(const std::string& fixture, double a) {
  if (fixture == "identity") return 1.0;
  if (fixture == "infeasible") return std::clamp(1.0 - 0.6 * (a - 1.0), 0.0, 1.0);
  return std::clamp(1.0 - 0.05 * (a - 1.0), 0.0, 1.0);
}

void emit(const json& j) {
  const std::string s = j.dump() + "\n";
  std::fwrite(s.data(), 1, s.size(), stdout);
  std::fflush(stdout);
}

json answer(const std::string& mode, const std::string& fixture, const std::string& line) {
  const json req = json::parse(line);
  const auto id = req.at("id").get<std::uint64_t>();
  const double a = req.at("alpha").get<double>();
  const double b = req.at("beta").get<double>();
  if (mode == "error") return {{"id", id}, {"error", "scorer exploded"}};
  if (mode == "bad-range") return {{"id", id}, {"s_text", 1.5}, {"s_img", 0.5}};
  if (mode == "stray-id") return {{"id", id + 1000}, {"s_text", 0.1}, {"s_img", 0.9}};
  return {{"id", id}, {"s_text", s_text(a, b)}, {"s_img", s_img(fixture, a)}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "normal";
  const std::string fixture = argc > 2 ? argv[2] : "peak";

  if (mode == "mute") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  if (mode == "bad-hello") {
    emit({{"greeting", "hi"}});
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  emit({{"hello", {{"name", "fake-" + mode}, {"concurrent", mode == "concurrent"}}}});

  if (mode == "concurrent") {
    // Answer every complete line of each read in reverse order.
    std::string buf;
    char chunk[65536];
    for (;;) {
      const ssize_t n = ::read(STDIN_FILENO, chunk, sizeof chunk);
      if (n <= 0) return 0;
      buf.append(chunk, static_cast<std::size_t>(n));
      std::vector<std::string> lines;
      std::size_t nl;
      while ((nl = buf.find('\n')) != std::string::npos) {
        lines.push_back(buf.substr(0, nl));
        buf.erase(0, nl + 1);
      }
      for (auto it = lines.rbegin(); it != lines.rend(); ++it) emit(answer(mode, fixture, *it));
    }
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (mode == "silent") continue;
    if (mode == "crash") return 7;
    if (mode == "slow") std::this_thread::sleep_for(std::chrono::milliseconds(50));
    emit(answer(mode, fixture, line));
  }
  return 0;
}
