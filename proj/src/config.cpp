#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "advland/error.hpp"
#include "advland/experiments.hpp"

namespace advland {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorCode::InvalidConfig, "config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) bad_value(key, text, "an unsigned integer");
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) bad_value(key, text, "a number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, text, "a number");
  }
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') bad_value(key, text, "a list like [1, 2, 3]");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::size_t> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  }
  if (out.empty()) bad_value(key, text, "a non-empty list");
  return out;
}

}  // namespace

void SweepConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = unquote(trim(raw_value));
  if (key == "d_values") {
    d_values = parse_list(key, value);
  } else if (key == "k_values") {
    k_values = parse_list(key, value);
  } else if (key == "L_values") {
    L_values = parse_list(key, value);
  } else if (key == "activation") {
    const auto kind = parse_activation(value);
    if (!kind) bad_value(key, value, "relu or tanh");
    activation = Activation(*kind);
  } else if (key == "nets_per_cell") {
    nets_per_cell = parse_u64(key, value);
  } else if (key == "inputs_per_net") {
    inputs_per_net = parse_u64(key, value);
  } else if (key == "eta_max") {
    eta_max = parse_double(key, value);
  } else if (key == "grid") {
    grid = parse_u64(key, value);
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "output_path") {
    output_path = value;
  } else if (key == "max_width") {
    max_width = parse_u64(key, value);
  } else if (key == "max_cell_flops") {
    max_cell_flops = parse_double(key, value);
  } else {
    fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
}

void SweepConfig::validate() const {
  const auto positive_list = [](const std::vector<std::size_t>& v, const char* name) {
    if (v.empty()) fail(ErrorCode::InvalidConfig, std::string(name) + " is empty");
    if (std::find(v.begin(), v.end(), std::size_t{0}) != v.end()) {
      fail(ErrorCode::InvalidConfig, std::string(name) + " contains 0");
    }
  };
  positive_list(d_values, "d_values");
  positive_list(k_values, "k_values");
  positive_list(L_values, "L_values");
  if (nets_per_cell * inputs_per_net < 1) {
    fail(ErrorCode::InvalidConfig, "nets_per_cell * inputs_per_net must be at least 1");
  }
  if (!(eta_max > 0.0)) fail(ErrorCode::InvalidConfig, "eta_max must be positive");
  if (grid < 2) fail(ErrorCode::InvalidConfig, "grid must be at least 2");

  const double n_total = static_cast<double>(nets_per_cell * inputs_per_net);
  for (std::size_t k : k_values) {
    if (k > max_width) {
      fail(ErrorCode::InvalidConfig, "k = " + std::to_string(k) + " exceeds max_width = " +
                                         std::to_string(max_width));
    }
    for (std::size_t d : d_values) {
      for (std::size_t L : L_values) {
        const double kd = static_cast<double>(k);
        const double per_eval = static_cast<double>(d) * kd + static_cast<double>(L - 1) * kd * kd;
        const double cost = n_total * static_cast<double>(grid + 40) * per_eval;
        if (cost > max_cell_flops) {
          std::ostringstream msg;
          msg << "cell (d=" << d << ", k=" << k << ", L=" << L << ") needs ~" << cost
              << " flops, above max_cell_flops = " << max_cell_flops;
          fail(ErrorCode::InvalidConfig, msg.str());
        }
      }
    }
  }
}

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ParseError, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      config.set(body.substr(0, eq), body.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_config(buffer.str());
}

}  // namespace advland
