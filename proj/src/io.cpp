#include "lfa/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace lfa {

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      const std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.push_back({raw.substr(start, i - start), static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

double parse_decimal(const Token& tok, int line) {
  double value = 0.0;
  const char* begin = tok.text.data();
  const char* end = begin + tok.text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParseError(line, tok.column, fmt::format("expected a finite decimal, got '{}'", tok.text));
  return value;
}

int parse_count(const Token& tok, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || value <= 0)
    throw ParseError(line, tok.column, fmt::format("expected a positive integer, got '{}'", tok.text));
  return value;
}

void expect_count(const Line& line, std::size_t want, const char* what) {
  if (line.tokens.size() != want)
    throw DimensionError(fmt::format("line {}: {} has {} entries, expected {}", line.number, what, line.tokens.size(), want));
}

}  // namespace

ProblemInstance parse_instance(const std::string& text) {
  const auto lines = tokenize(text);
  std::optional<double> gamma;
  std::optional<int> states;
  std::optional<Mat> P;
  std::optional<std::vector<RewardLaw>> rewards;
  std::optional<Vec> mu;
  std::optional<Mat> features;
  FeatureBound bound = FeatureBound::AllStates;

  auto need_states = [&](const Line& line) {
    if (!states) throw ParseError(line.number, 1, "'states' must precede this section");
    return *states;
  };
  auto once = [](const Line& line, bool seen) {
    if (seen) throw ParseError(line.number, 1, fmt::format("duplicate section '{}'", line.tokens[0].text));
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const std::string& key = line.tokens[0].text;
    if (key == "gamma") {
      once(line, gamma.has_value());
      expect_count(line, 2, "gamma");
      gamma = parse_decimal(line.tokens[1], line.number);
    } else if (key == "states") {
      once(line, states.has_value());
      expect_count(line, 2, "states");
      states = parse_count(line.tokens[1], line.number);
    } else if (key == "P") {
      once(line, P.has_value());
      expect_count(line, 1, "P header");
      const int S = need_states(line);
      Mat m(S, S);
      for (int row = 0; row < S; ++row) {
        if (++i >= lines.size()) throw ParseError(line.number, 1, "unexpected end of input inside P");
        expect_count(lines[i], static_cast<std::size_t>(S), "P row");
        for (int col = 0; col < S; ++col) m(row, col) = parse_decimal(lines[i].tokens[static_cast<std::size_t>(col)], lines[i].number);
      }
      P = m;
    } else if (key == "r") {
      once(line, rewards.has_value());
      const int S = need_states(line);
      std::vector<RewardLaw> laws;
      for (std::size_t k = 1; k < line.tokens.size(); ++k) {
        if (line.tokens[k].text == "ber") {
          if (k + 1 >= line.tokens.size()) throw ParseError(line.number, line.tokens[k].column, "'ber' needs a probability");
          laws.push_back(RewardLaw::bernoulli(parse_decimal(line.tokens[k + 1], line.number)));
          ++k;
        } else {
          laws.push_back(RewardLaw::deterministic(parse_decimal(line.tokens[k], line.number)));
        }
      }
      if (static_cast<int>(laws.size()) != S)
        throw DimensionError(fmt::format("line {}: r has {} entries, expected {}", line.number, laws.size(), S));
      rewards = laws;
    } else if (key == "mu") {
      once(line, mu.has_value());
      const int S = need_states(line);
      expect_count(line, static_cast<std::size_t>(S) + 1, "mu");
      Vec m(S);
      for (int s = 0; s < S; ++s) m[s] = parse_decimal(line.tokens[static_cast<std::size_t>(s) + 1], line.number);
      mu = m;
    } else if (key == "features") {
      once(line, features.has_value());
      const int S = need_states(line);
      if (line.tokens.size() < 2 || line.tokens.size() > 3) throw ParseError(line.number, 1, "usage: features <d> [support-bounded]");
      const int d = parse_count(line.tokens[1], line.number);
      if (line.tokens.size() == 3) {
        if (line.tokens[2].text != "support-bounded")
          throw ParseError(line.number, line.tokens[2].column, fmt::format("unknown feature option '{}'", line.tokens[2].text));
        bound = FeatureBound::SupportOnly;
      }
      Mat m(S, d);
      for (int row = 0; row < S; ++row) {
        if (++i >= lines.size()) throw ParseError(line.number, 1, "unexpected end of input inside features");
        expect_count(lines[i], static_cast<std::size_t>(d), "feature row");
        for (int col = 0; col < d; ++col) m(row, col) = parse_decimal(lines[i].tokens[static_cast<std::size_t>(col)], lines[i].number);
      }
      features = m;
    } else {
      throw ParseError(line.number, line.tokens[0].column, fmt::format("unknown keyword '{}'", key));
    }
  }
  const int eof = lines.empty() ? 1 : lines.back().number;
  if (!gamma) throw ParseError(eof, 1, "missing section 'gamma'");
  if (!states) throw ParseError(eof, 1, "missing section 'states'");
  if (!P) throw ParseError(eof, 1, "missing section 'P'");
  if (!rewards) throw ParseError(eof, 1, "missing section 'r'");
  if (!mu) throw ParseError(eof, 1, "missing section 'mu'");
  if (!features) throw ParseError(eof, 1, "missing section 'features'");
  return ProblemInstance::build(*P, *rewards, *gamma, *features, *mu, bound);
}

std::string render_instance(const ProblemInstance& instance) {
  const int S = instance.n_states();
  std::string out;
  out += fmt::format("gamma {:.17g}\nstates {}\nP\n", instance.gamma(), S);
  for (int s = 0; s < S; ++s) {
    for (int t = 0; t < S; ++t) out += fmt::format("{}{:.17g}", t ? " " : "", instance.P()(s, t));
    out += "\n";
  }
  out += "r";
  for (const auto& law : instance.rewards()) {
    if (law.kind == RewardLaw::Kind::Bernoulli) {
      out += fmt::format(" ber {:.17g}", law.param);
    } else {
      out += fmt::format(" {:.17g}", law.param);
    }
  }
  out += "\nmu";
  for (int s = 0; s < S; ++s) out += fmt::format(" {:.17g}", instance.mu().weights()[s]);
  out += fmt::format("\nfeatures {}{}\n", instance.dim(),
                     instance.features().bound() == FeatureBound::SupportOnly ? " support-bounded" : "");
  for (int s = 0; s < S; ++s) {
    for (int j = 0; j < instance.dim(); ++j) out += fmt::format("{}{:.17g}", j ? " " : "", instance.Phi()(s, j));
    out += "\n";
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << text;
}

ProblemInstance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

void save_instance(const ProblemInstance& instance, const std::string& path) {
  write_file(path, render_instance(instance));
}

std::string render_dataset(const Dataset& dataset) {
  std::string out = fmt::format("# aliased d={} n={} seed={}\n", dataset.dim, dataset.n(), dataset.seed);
  for (const auto& x : dataset.samples) {
    for (Eigen::Index j = 0; j < x.phi.size(); ++j) out += fmt::format("{:.17g} ", x.phi[j]);
    out += fmt::format("{:.17g}", x.reward);
    for (Eigen::Index j = 0; j < x.phi_next.size(); ++j) out += fmt::format(" {:.17g}", x.phi_next[j]);
    out += "\n";
  }
  return out;
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, 1, "empty dataset");
  Dataset ds;
  std::size_t n = 0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(), "# aliased d=%d n=%zu seed=%llu", &ds.dim, &n, &seed) != 3 || ds.dim <= 0)
    throw ParseError(1, 1, "bad dataset header");
  ds.seed = seed;
  std::string raw;
  int number = 1;
  while (std::getline(in, raw)) {
    ++number;
    Line line{number, {}};
    for (auto& l : tokenize(raw)) line.tokens = l.tokens;
    if (line.tokens.empty()) continue;
    expect_count(line, static_cast<std::size_t>(2 * ds.dim + 1), "sample");
    AliasedSample x{Vec(ds.dim), 0.0, Vec(ds.dim)};
    for (int j = 0; j < ds.dim; ++j) x.phi[j] = parse_decimal(line.tokens[static_cast<std::size_t>(j)], number);
    x.reward = parse_decimal(line.tokens[static_cast<std::size_t>(ds.dim)], number);
    for (int j = 0; j < ds.dim; ++j)
      x.phi_next[j] = parse_decimal(line.tokens[static_cast<std::size_t>(ds.dim + 1 + j)], number);
    ds.samples.push_back(std::move(x));
  }
  if (ds.n() != n) throw DimensionError(fmt::format("dataset header says n={} but {} samples follow", n, ds.n()));
  return ds;
}

}  // namespace lfa
