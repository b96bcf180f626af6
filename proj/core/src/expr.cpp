#include "kropina/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace kropina {
namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }
  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size()) {
      char c = s[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
        break;
      ++pos;
    }
    if (pos == start) throw ParseError("expected a token", start);
    return s.substr(start, pos - start);
  }
};

// Integer, decimal, or p/q.  Returns both the double value and, when the
// literal is integral, the exact integer.
void parse_number(const std::string& tok, std::size_t at, double& out,
                  bool& is_int, long& iout) {
  auto slash = tok.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_n = 0, used_d = 0;
      const std::string num = tok.substr(0, slash);
      const std::string den = tok.substr(slash + 1);
      long p = std::stol(num, &used_n);
      long q = std::stol(den, &used_d);
      if (used_n != num.size() || used_d != den.size() || q == 0)
        throw ParseError("bad rational literal '" + tok + "'", at);
      out = static_cast<double>(p) / static_cast<double>(q);
      is_int = (p % q == 0);
      iout = is_int ? p / q : 0;
      return;
    }
    std::size_t used = 0;
    out = std::stod(tok, &used);
    if (used != tok.size())
      throw ParseError("bad numeric literal '" + tok + "'", at);
    is_int = tok.find_first_of(".eE") == std::string::npos;
    iout = is_int ? std::stol(tok) : 0;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("bad numeric literal '" + tok + "'", at);
  }
}

int parse_slot(Cursor& c, int dim) {
  c.skip_ws();  // report the token itself, not the gap before it
  std::size_t at = c.pos;
  std::string tok = c.token();
  double v;
  bool is_int;
  long i;
  parse_number(tok, at, v, is_int, i);
  if (!is_int || i < 0) throw ParseError("coordinate index must be a non-negative integer", at);
  if (dim > 0 && i >= dim)
    throw ParseError("coordinate index out of range", at);
  return static_cast<int>(i);
}

Expr parse_node(Cursor& c, int dim) {
  c.expect('(');
  c.skip_ws();
  std::size_t head_at = c.pos;
  std::string head = c.token();
  Expr e;
  if (head == "+" || head == "*") {
    e.op = head == "+" ? Expr::Op::add : Expr::Op::mul;
    e.kids.push_back(parse_node(c, dim));
    e.kids.push_back(parse_node(c, dim));
  } else if (head == "pow") {
    e.op = Expr::Op::pow;
    e.kids.push_back(parse_node(c, dim));
    c.skip_ws();
    std::size_t at = c.pos;
    parse_number(c.token(), at, e.value, e.exponent_is_int, e.iexp);
  } else if (head == "x" || head == "y") {
    e.op = head == "x" ? Expr::Op::var_x : Expr::Op::var_y;
    e.index = parse_slot(c, dim);
  } else if (head == "const") {
    e.op = Expr::Op::constant;
    c.skip_ws();
    std::size_t at = c.pos;
    bool dummy_int;
    long dummy_i;
    parse_number(c.token(), at, e.value, dummy_int, dummy_i);
  } else {
    throw ParseError("unknown operator '" + head + "'", head_at);
  }
  c.expect(')');
  return e;
}

void render(const Expr& e, std::ostringstream& os) {
  switch (e.op) {
    case Expr::Op::add:
    case Expr::Op::mul:
      os << '(' << (e.op == Expr::Op::add ? '+' : '*') << ' ';
      render(e.kids[0], os);
      os << ' ';
      render(e.kids[1], os);
      os << ')';
      break;
    case Expr::Op::pow: {
      os << "(pow ";
      render(e.kids[0], os);
      char buf[40];
      if (e.exponent_is_int)
        std::snprintf(buf, sizeof buf, " %ld)", e.iexp);
      else
        std::snprintf(buf, sizeof buf, " %.17g)", e.value);
      os << buf;
      break;
    }
    case Expr::Op::var_x:
      os << "(x " << e.index << ')';
      break;
    case Expr::Op::var_y:
      os << "(y " << e.index << ')';
      break;
    case Expr::Op::constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "(const %.17g)", e.value);
      os << buf;
      break;
    }
  }
}

}  // namespace

Expr parse_expr(const std::string& text, int dim) {
  Cursor c{text};
  Expr e = parse_node(c, dim);
  if (!c.done()) throw ParseError("trailing input after expression", c.pos);
  return e;
}

bool expr_uses_y(const Expr& e) {
  if (e.op == Expr::Op::var_y) return true;
  for (const auto& k : e.kids)
    if (expr_uses_y(k)) return true;
  return false;
}

std::string expr_to_string(const Expr& e) {
  std::ostringstream os;
  render(e, os);
  return os.str();
}

}  // namespace kropina
