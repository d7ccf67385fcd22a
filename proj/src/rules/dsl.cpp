#include "proxweb/rules/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

namespace proxweb::rules {
namespace {

enum class Tok { Word, LParen, RParen, Comma, Op, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' ||
         c == '-';
}

bool iequals(std::string_view a, std::string_view b) {
  return std::ranges::equal(a, b, [](char x, char y) {
    return std::toupper(static_cast<unsigned char>(x)) ==
           std::toupper(static_cast<unsigned char>(y));
  });
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of line";
    default: return "'" + std::string(t.text) + "'";
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t line) : text_(text), line_(line) { tokenize(); }

  ProximityRule parse() {
    ProximityRule rule;
    keyword("IF");
    keyword("visible");
    expect(Tok::LParen, "'('");
    rule.trigger_mac = mac();
    expect(Tok::RParen, "')'");

    bool have_rssi = false;
    while (peek_keyword("AND")) {
      next();
      const Token& t = peek();
      if (peek_keyword("rssi") && !have_rssi) {
        next();
        const Token& op = expect(Tok::Op, "'>='");
        if (op.text != ">=") fail(op, "rssi threshold must use '>='");
        const Token& num = peek();
        const auto value = integer();
        if (value < kMinRssiDbm || value > kMaxRssiDbm) {
          threshold_error(num, "rssi threshold outside [-120, 0] dBm");
        }
        rule.min_rssi_dbm = static_cast<int>(value);
        have_rssi = true;
      } else if (peek_keyword("stat") && !rule.stat) {
        next();
        rule.stat = stat_predicate();
      } else {
        fail(t, "expected 'rssi' or 'stat' clause, found " + describe(t));
      }
    }

    keyword("THEN");
    keyword("show");
    expect(Tok::LParen, "'('");
    rule.content_ids.push_back(content_id());
    while (peek().kind == Tok::Comma) {
      next();
      rule.content_ids.push_back(content_id());
    }
    expect(Tok::RParen, "')'");

    if (peek_keyword("PRIORITY")) {
      next();
      const Token& num = peek();
      const auto value = integer();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        threshold_error(num, "priority out of range");
      }
      rule.priority = static_cast<int>(value);
    }
    if (peek_keyword("DISABLED")) {
      next();
      rule.enabled = false;
    }
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()));
    return rule;
  }

 private:
  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      if (c == '#') break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      const std::size_t col = i + 1;
      if (c == '(' || c == ')' || c == ',') {
        const Tok kind = c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : Tok::Comma;
        tokens_.push_back({kind, text_.substr(i, 1), col});
        ++i;
      } else if (c == '<' || c == '>') {
        const std::size_t len = (i + 1 < text_.size() && text_[i + 1] == '=') ? 2 : 1;
        tokens_.push_back({Tok::Op, text_.substr(i, len), col});
        i += len;
      } else if (is_word_char(c)) {
        std::size_t j = i;
        while (j < text_.size() && is_word_char(text_[j])) ++j;
        tokens_.push_back({Tok::Word, text_.substr(i, j - i), col});
        i = j;
      } else {
        throw Error(ErrorCode::SyntaxError,
                    where(col) + "unexpected character '" + std::string(1, c) + "'",
                    std::string(1, c), SourcePos{line_, col});
      }
    }
    tokens_.push_back({Tok::End, {}, text_.size() + 1});
  }

  std::string where(std::size_t col) const {
    return std::to_string(line_) + ":" + std::to_string(col) + ": ";
  }

  [[noreturn]] void fail(const Token& t, const std::string& why) const {
    throw Error(ErrorCode::SyntaxError, where(t.column) + why, std::string(t.text),
                SourcePos{line_, t.column});
  }

  [[noreturn]] void threshold_error(const Token& t, const std::string& why) const {
    throw Error(ErrorCode::InvalidThreshold, where(t.column) + why, std::string(t.text),
                SourcePos{line_, t.column});
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  bool peek_keyword(std::string_view kw) const {
    return peek().kind == Tok::Word && iequals(peek().text, kw);
  }

  void keyword(std::string_view kw) {
    if (!peek_keyword(kw)) fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    next();
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }

  MacAddress mac() {
    const Token& t = peek();
    if (t.kind != Tok::Word) fail(t, "expected a MAC address, found " + describe(t));
    auto parsed = MacAddress::try_parse(t.text);
    if (!parsed) {
      throw Error(ErrorCode::InvalidMac,
                  where(t.column) + "invalid MAC address '" + std::string(t.text) + "'",
                  std::string(t.text), SourcePos{line_, t.column});
    }
    next();
    return *parsed;
  }

  std::int64_t integer() {
    const Token& t = peek();
    if (t.kind != Tok::Word) fail(t, "expected an integer, found " + describe(t));
    std::int64_t value = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto [ptr, ec] = std::from_chars(t.text.data(), end, value);
    if (ec == std::errc::result_out_of_range) threshold_error(t, "integer out of range");
    if (ec != std::errc{} || ptr != end) fail(t, "expected an integer, found " + describe(t));
    next();
    return value;
  }

  std::string content_id() {
    const Token& t = peek();
    if (t.kind != Tok::Word || t.text.find(':') != std::string_view::npos) {
      fail(t, "expected a content id, found " + describe(t));
    }
    next();
    return std::string(t.text);
  }

  StatPredicate stat_predicate() {
    StatPredicate pred;
    expect(Tok::LParen, "'('");
    const Token& m = peek();
    if (m.kind != Tok::Word) fail(m, "expected visit_count or unique_devices, found " + describe(m));
    auto metric = parse_metric(m.text);
    if (!metric) fail(m, "unknown metric " + describe(m));
    next();
    pred.metric = *metric;
    expect(Tok::Comma, "','");
    const Token& w = peek();
    const auto window = integer();
    if (window <= 0) threshold_error(w, "stat window must be positive");
    pred.window = Seconds{window};
    expect(Tok::RParen, "')'");
    const Token& op = expect(Tok::Op, "a comparison operator");
    pred.cmp = *parse_comparison(op.text);
    const Token& th = peek();
    pred.threshold = integer();
    if (pred.threshold < 0) threshold_error(th, "stat threshold must be non-negative");
    return pred;
  }

  std::string_view text_;
  std::size_t line_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

ProximityRule parse_rule(std::string_view text, std::size_t line) {
  return Parser(text, line).parse();
}

std::string format_rule(const ProximityRule& rule) {
  std::string out = "IF visible(" + rule.trigger_mac.str() + ")";
  if (rule.min_rssi_dbm) out += " AND rssi >= " + std::to_string(*rule.min_rssi_dbm);
  if (rule.stat) {
    out += " AND stat(";
    out += to_string(rule.stat->metric);
    out += ", " + std::to_string(rule.stat->window.count()) + ") ";
    out += to_symbol(rule.stat->cmp);
    out += " " + std::to_string(rule.stat->threshold);
  }
  out += " THEN show(";
  for (std::size_t i = 0; i < rule.content_ids.size(); ++i) {
    if (i > 0) out += ", ";
    out += rule.content_ids[i];
  }
  out += ")";
  if (rule.priority != 0) out += " PRIORITY " + std::to_string(rule.priority);
  if (!rule.enabled) out += " DISABLED";
  return out;
}

RuleFile parse_rule_file(std::string_view text) {
  RuleFile file;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!blank_or_comment(line)) {
      try {
        file.rules.push_back({line_no, parse_rule(line, line_no)});
      } catch (const Error& e) {
        file.diagnostics.push_back(e);
      }
    }
    if (nl == std::string_view::npos) break;
  }
  return file;
}

}  // namespace proxweb::rules
