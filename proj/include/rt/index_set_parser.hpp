#pragma once
// Grammar for symbolic index sets:
//
//   set     := 'EMPTY' '(' int ')' | term ('|' term)*
//   term    := power ('x' power)*
//   power   := factor ('^' int)?            repeats a factor over coordinates
//   factor  := literal ('&' literal)* | '(' factor ')'
//   literal := '!'? generator
//   generator := 'FULL' | 'FIN' '(' [int (',' int)*] ')' | 'AP' '(' int ',' int ')'
//              | 'GEO' '(' int ')' | 'POW' '(' int ')'
//
// Example: "AP(1,2) x FULL | FIN(3,5) x GEO(2)".

#include <string_view>

#include "rt/index_set.hpp"
#include "rt/text.hpp"

namespace rt {

namespace detail {

inline Generator parse_generator(text::Cursor& c) {
  if (c.accept_word("FULL")) return Generator::full();
  if (c.accept_word("FIN")) {
    c.expect('(');
    std::vector<Index> v;
    if (!c.accept(')')) {
      do v.push_back(c.integer());
      while (c.accept(','));
      c.expect(')');
    }
    return Generator::finite(std::move(v));
  }
  if (c.accept_word("AP")) {
    c.expect('(');
    const Index s = c.integer();
    c.expect(',');
    const Index d = c.integer();
    c.expect(')');
    return Generator::arithmetic(s, d);
  }
  if (c.accept_word("GEO")) {
    c.expect('(');
    const Index b = c.integer();
    c.expect(')');
    return Generator::geometric(b);
  }
  if (c.accept_word("POW")) {
    c.expect('(');
    const Index e = c.integer();
    c.expect(')');
    return Generator::power(e);
  }
  c.fail("generator (FULL, FIN, AP, GEO, POW)");
}

inline CoordSet parse_factor(text::Cursor& c) {
  if (c.accept('(')) {
    CoordSet inner = parse_factor(c);
    c.expect(')');
    return inner;
  }
  std::vector<Generator> inc, exc;
  do {
    const bool negated = c.accept('!');
    (negated ? exc : inc).push_back(parse_generator(c));
  } while (c.accept('&'));
  return CoordSet(std::move(inc), std::move(exc));
}

inline Product parse_term(text::Cursor& c) {
  Product p;
  do {
    CoordSet f = parse_factor(c);
    Index reps = 1;
    if (c.accept('^')) {
      reps = c.integer();
      if (reps < 1) c.fail("positive repetition count");
    }
    for (Index r = 0; r < reps; ++r) p.push_back(f);
  } while (c.accept_word("x") || c.accept('*'));
  return p;
}

}  // namespace detail

inline IndexSet parse_index_set(std::string_view src) {
  text::Cursor c(src);
  if (c.accept_word("EMPTY")) {
    c.expect('(');
    const Index n = c.integer();
    c.expect(')');
    if (n < 1) throw ConfigError("EMPTY needs a positive dimension");
    if (!c.at_end()) c.fail("end of input");
    return IndexSet::empty_set(static_cast<std::size_t>(n));
  }
  std::vector<Product> terms;
  std::size_t n = 0;
  do {
    const std::size_t at = c.position();
    Product p = detail::parse_term(c);
    if (n == 0) n = p.size();
    if (p.size() != n)
      throw ParseError(at, "term of dimension " + std::to_string(n),
                       "term of dimension " + std::to_string(p.size()));
    terms.push_back(std::move(p));
  } while (c.accept('|'));
  if (!c.at_end()) c.fail("'|', 'x' or end of input");
  return IndexSet(n, std::move(terms));
}

}  // namespace rt
