#include "deformatics/jet.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <set>
#include <sstream>

namespace deformatics::jet {

namespace {
std::atomic<int> g_dmax{4};

constexpr uint32_t kFamShift = 24, kIntShift = 19, kFormShift = 17, kOrdShift = 13, kC0Shift = 9, kC1Shift = 5;
}  // namespace

int dmax() { return g_dmax.load(); }

void set_dmax(int d) {
  if (d < 1 || d > kMaxDmax) throw PreconditionError("D_max must lie in 1.." + std::to_string(kMaxDmax));
  g_dmax.store(d);
}

// ---------------------------------------------------------------- keys

uint32_t Var::key() const {
  int ord = order();
  return (static_cast<uint32_t>(family) << kFamShift) | (static_cast<uint32_t>(internal) << kIntShift) |
         (static_cast<uint32_t>(form) << kFormShift) | (static_cast<uint32_t>(ord) << kOrdShift) |
         (static_cast<uint32_t>(15 - counts[0]) << kC0Shift) | (static_cast<uint32_t>(15 - counts[1]) << kC1Shift);
}

Var Var::from_key(uint32_t key) {
  Var v;
  v.family = static_cast<Family>(key >> kFamShift);
  v.internal = (key >> kIntShift) & 31;
  v.form = (key >> kFormShift) & 3;
  int ord = (key >> kOrdShift) & 15;
  v.counts[0] = 15 - static_cast<int>((key >> kC0Shift) & 15);
  v.counts[1] = 15 - static_cast<int>((key >> kC1Shift) & 15);
  v.counts[2] = ord - v.counts[0] - v.counts[1];
  return v;
}

std::vector<int> Var::multi_index() const {
  std::vector<int> out;
  for (int nu = 0; nu < kDim; ++nu)
    for (int i = 0; i < counts[nu]; ++i) out.push_back(nu);
  return out;
}

std::string Var::name() const {
  std::string s;
  switch (family) {
    case Family::A:
      s = "A" + std::to_string(internal + 1) + "_" + std::to_string(form);
      break;
    case Family::Z1:
    case Family::Z2:
    case Family::Z3:
      s = "z" + std::to_string(static_cast<int>(family)) + "." + std::to_string(internal + 1);
      break;
    case Family::Rigid:
      s = "r." + std::to_string(internal + 1);
      break;
    case Family::X:
      return "x" + std::to_string(form);
  }
  if (order() > 0) {
    s += ";";
    for (int d : multi_index()) s += static_cast<char>('0' + d);
  }
  return s;
}

uint32_t key_base(uint32_t key) {
  Var v = Var::from_key(key);
  v.counts = {0, 0, 0};
  return v.key();
}

int key_order(uint32_t key) { return (key >> kOrdShift) & 15; }

std::array<int, kDim> key_counts(uint32_t key) { return Var::from_key(key).counts; }

uint32_t key_lift(uint32_t key, int nu) {
  Var v = Var::from_key(key);
  if (v.order() + 1 > dmax())
    throw DerivativeOrderOverflow("derivative order " + std::to_string(v.order() + 1) + " of " + v.name() +
                                  " exceeds D_max = " + std::to_string(dmax()));
  ++v.counts[nu];
  return v.key();
}

int key_weight(uint32_t key) { return key_family(key) == Family::X ? -1 : key_order(key); }

// ---------------------------------------------------------------- monomials

Monomial Monomial::of(uint32_t key, int power) {
  if (power > kCapacity) throw PreconditionError("monomial degree exceeds capacity");
  Monomial m;
  for (int i = 0; i < power; ++i) m.k_[i] = key;
  m.n_ = static_cast<uint8_t>(power);
  return m;
}

Monomial Monomial::operator*(const Monomial& o) const {
  if (n_ + o.n_ > kCapacity) throw PreconditionError("monomial degree exceeds capacity");
  Monomial r;
  std::merge(begin(), end(), o.begin(), o.end(), r.k_.begin());
  r.n_ = static_cast<uint8_t>(n_ + o.n_);
  return r;
}

Monomial Monomial::without(int i) const {
  Monomial r;
  int j = 0;
  for (int t = 0; t < n_; ++t)
    if (t != i) r.k_[j++] = k_[t];
  r.n_ = static_cast<uint8_t>(n_ - 1);
  return r;
}

Monomial Monomial::with(uint32_t key) const {
  if (n_ + 1 > kCapacity) throw PreconditionError("monomial degree exceeds capacity");
  Monomial r;
  int j = 0, t = 0;
  while (t < n_ && k_[t] <= key) r.k_[j++] = k_[t++];
  r.k_[j++] = key;
  while (t < n_) r.k_[j++] = k_[t++];
  r.n_ = static_cast<uint8_t>(n_ + 1);
  return r;
}

int Monomial::count(uint32_t key) const {
  return static_cast<int>(std::count(begin(), end(), key));
}

int Monomial::grade() const { return family_degree(Family::A); }

int Monomial::family_degree(Family f) const {
  int c = 0;
  for (int i = 0; i < n_; ++i)
    if (key_family(k_[i]) == f) ++c;
  return c;
}

int Monomial::weight() const {
  int w = 0;
  for (int i = 0; i < n_; ++i) w += key_weight(k_[i]);
  return w;
}

bool Monomial::has_family(Family f) const { return family_degree(f) > 0; }

bool Monomial::operator==(const Monomial& o) const {
  return n_ == o.n_ && std::equal(begin(), end(), o.begin());
}

bool Monomial::operator<(const Monomial& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return std::lexicographical_compare(begin(), end(), o.begin(), o.end());
}

size_t Monomial::hash() const {
  uint64_t h = 0x9e3779b97f4a7c15ULL ^ n_;
  for (int i = 0; i < n_; ++i) {
    h ^= k_[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
  }
  return static_cast<size_t>(h ^ (h >> 31));
}

// ---------------------------------------------------------------- polynomials

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.push_back({Monomial(), c});
}

Poly Poly::variable(const Var& v) { return monomial(Monomial::of(v.key()), 1); }

Poly Poly::monomial(const Monomial& m, const Rational& c) {
  Poly p;
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.mono < y.mono; });
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono)
      p.terms_.back().coef += t.coef;
    else
      p.terms_.push_back(std::move(t));
  }
  p.terms_.erase(std::remove_if(p.terms_.begin(), p.terms_.end(), [](const Term& t) { return t.coef == 0; }),
                 p.terms_.end());
  return p;
}

bool Poly::operator==(const Poly& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (!(terms_[i].mono == o.terms_[i].mono) || terms_[i].coef != o.terms_[i].coef) return false;
  return true;
}

namespace {

Poly merge_add(const std::vector<Term>& a, const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].mono < b[j].mono)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].mono < a[i].mono) {
      out.push_back(b[j]);
      if (sign < 0) out.back().coef = -out.back().coef;
      ++j;
    } else {
      Rational c = sign > 0 ? Rational(a[i].coef + b[j].coef) : Rational(a[i].coef - b[j].coef);
      if (c != 0) out.push_back({a[i].mono, c});
      ++i;
      ++j;
    }
  }
  return Poly::from_terms(std::move(out));
}

}  // namespace

Poly Poly::operator+(const Poly& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  return merge_add(terms_, o.terms_, 1);
}

Poly Poly::operator-(const Poly& o) const {
  if (o.is_zero()) return *this;
  return merge_add(terms_, o.terms_, -1);
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

Poly Poly::operator*(const Poly& o) const { return mul_trunc(*this, o, -1); }

Poly& Poly::operator+=(const Poly& o) { return *this = *this + o; }
Poly& Poly::operator-=(const Poly& o) { return *this = *this - o; }

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coef *= c;
  return *this;
}

Poly Poly::operator*(const Rational& c) const {
  Poly p = *this;
  p *= c;
  return p;
}

int Poly::max_grade() const {
  int g = -1;
  for (const auto& t : terms_) g = std::max(g, t.mono.grade());
  return g;
}

int Poly::min_grade() const {
  if (terms_.empty()) return -1;
  int g = 1 << 20;
  for (const auto& t : terms_) g = std::min(g, t.mono.grade());
  return g;
}

Poly Poly::grade_part(int g) const {
  Poly p;
  for (const auto& t : terms_)
    if (t.mono.grade() == g) p.terms_.push_back(t);
  return p;
}

Poly Poly::truncate(int max_grade) const {
  if (max_grade < 0) return *this;
  Poly p;
  for (const auto& t : terms_)
    if (t.mono.grade() <= max_grade) p.terms_.push_back(t);
  return p;
}

Poly Poly::high_part(int min_grade) const {
  Poly p;
  for (const auto& t : terms_)
    if (t.mono.grade() >= min_grade) p.terms_.push_back(t);
  return p;
}

bool Poly::has_family(Family f) const {
  for (const auto& t : terms_)
    if (t.mono.has_family(f)) return true;
  return false;
}

int Poly::max_family_degree(Family f) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.family_degree(f));
  return d;
}

std::vector<uint32_t> Poly::variables() const {
  std::set<uint32_t> s;
  for (const auto& t : terms_)
    for (uint32_t k : t.mono) s.insert(k);
  return {s.begin(), s.end()};
}

Rational Poly::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m, [](const Term& t, const Monomial& x) { return t.mono < x; });
  if (it != terms_.end() && it->mono == m) return it->coef;
  return 0;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << format_rational(terms_[i].coef);
    const auto& m = terms_[i].mono;
    for (int j = 0; j < m.degree();) {
      int e = 1;
      while (j + e < m.degree() && m[j + e] == m[j]) ++e;
      os << "*" << Var::from_key(m[j]).name();
      if (e > 1) os << "^" << e;
      j += e;
    }
  }
  return os.str();
}

namespace {

int parse_int(std::string_view s, std::string_view ctx) {
  if (s.empty()) throw ParseError("empty integer in '" + std::string(ctx) + "'");
  int v = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError("bad integer in '" + std::string(ctx) + "'");
    v = v * 10 + (ch - '0');
    if (v > 100000) throw ParseError("integer too large in '" + std::string(ctx) + "'");
  }
  return v;
}

Var parse_var(std::string_view tok) {
  Var v;
  std::string_view body = tok, derivs;
  auto semi = tok.find(';');
  if (semi != std::string_view::npos) {
    body = tok.substr(0, semi);
    derivs = tok.substr(semi + 1);
  }
  if (body.empty()) throw ParseError("empty variable");
  auto internal_of = [&](std::string_view s) {
    int a = parse_int(s, tok);
    if (a < 1 || a > kMaxInternal) throw ParseError("internal index out of range in '" + std::string(tok) + "'");
    return a - 1;
  };
  if (body[0] == 'A') {
    auto us = body.find('_');
    if (us == std::string_view::npos) throw ParseError("expected A<a>_<mu> in '" + std::string(tok) + "'");
    v.family = Family::A;
    v.internal = internal_of(body.substr(1, us - 1));
    v.form = parse_int(body.substr(us + 1), tok);
    if (v.form >= kDim) throw ParseError("form index out of range in '" + std::string(tok) + "'");
  } else if (body[0] == 'z') {
    auto dot = body.find('.');
    if (dot == std::string_view::npos) throw ParseError("expected z<s>.<a> in '" + std::string(tok) + "'");
    int s = parse_int(body.substr(1, dot - 1), tok);
    if (s < 1 || s > 3) throw ParseError("parameter family out of range in '" + std::string(tok) + "'");
    v.family = zeta_family(s);
    v.internal = internal_of(body.substr(dot + 1));
  } else if (body[0] == 'r') {
    if (body.size() < 3 || body[1] != '.') throw ParseError("expected r.<a> in '" + std::string(tok) + "'");
    v.family = Family::Rigid;
    v.internal = internal_of(body.substr(2));
  } else if (body[0] == 'x') {
    v.family = Family::X;
    v.form = parse_int(body.substr(1), tok);
    if (v.form >= kDim) throw ParseError("coordinate index out of range in '" + std::string(tok) + "'");
    if (!derivs.empty()) throw ParseError("coordinates carry no derivatives: '" + std::string(tok) + "'");
  } else {
    throw ParseError("unknown variable '" + std::string(tok) + "'");
  }
  for (char ch : derivs) {
    if (ch < '0' || ch > '2') throw ParseError("bad derivative index in '" + std::string(tok) + "'");
    ++v.counts[ch - '0'];
  }
  if (v.order() > dmax()) throw DerivativeOrderOverflow("parsed variable exceeds D_max: " + std::string(tok));
  if ((v.family == Family::Rigid) && v.order() > 0)
    throw ParseError("rigid parameters carry no derivatives: '" + std::string(tok) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Poly Poly::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ParseError("empty polynomial");
  if (text == "0") return Poly();
  std::vector<Term> terms;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t next = text.find(" + ", pos);
    std::string_view term = trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (term.empty()) throw ParseError("empty term");
    size_t star = term.find('*');
    Rational c = parse_rational(term.substr(0, star));
    Monomial m;
    while (star != std::string_view::npos) {
      size_t nstar = term.find('*', star + 1);
      std::string_view fac = term.substr(star + 1, nstar == std::string_view::npos ? std::string_view::npos : nstar - star - 1);
      int power = 1;
      auto caret = fac.find('^');
      if (caret != std::string_view::npos) {
        power = parse_int(fac.substr(caret + 1), fac);
        fac = fac.substr(0, caret);
      }
      if (power < 1) throw ParseError("bad exponent");
      m = m * Monomial::of(parse_var(fac).key(), power);
      star = nstar;
    }
    terms.push_back({m, c});
    if (next == std::string_view::npos) break;
    pos = next + 3;
  }
  return from_terms(std::move(terms));
}

double Poly::evaluate(const std::function<double(uint32_t)>& value) const {
  double s = 0;
  for (const auto& t : terms_) {
    double v = t.coef.get_d();
    for (uint32_t k : t.mono) v *= value(k);
    s += v;
  }
  return s;
}

Poly Poly::map_keys(const std::function<uint32_t(uint32_t)>& f) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m;
    bool dead = false;
    for (uint32_t k : t.mono) {
      uint32_t nk = f(k);
      if (nk == 0) {
        dead = true;
        break;
      }
      m = m.with(nk);
    }
    if (!dead) out.push_back({m, t.coef});
  }
  return from_terms(std::move(out));
}

Poly mul_trunc(const Poly& a, const Poly& b, int max_grade) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (b.size() == 1 && b.terms()[0].mono.empty()) return a.truncate(max_grade) * b.terms()[0].coef;
  if (a.size() == 1 && a.terms()[0].mono.empty()) return b.truncate(max_grade) * a.terms()[0].coef;
  PolyBuilder pb;
  pb.add_product(a, b, max_grade);
  return pb.build();
}

// ---------------------------------------------------------------- builder

void PolyBuilder::add(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = acc_.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void PolyBuilder::add(const Poly& p, const Rational& scale) {
  for (const auto& t : p.terms()) add(t.mono, t.coef * scale);
}

void PolyBuilder::add_product(const Monomial& m, const Rational& scale, const Poly& p, int max_grade) {
  if (scale == 0) return;
  int g0 = m.grade();
  if (max_grade >= 0 && g0 > max_grade) return;
  Rational tmp;
  for (const auto& t : p.terms()) {
    if (max_grade >= 0 && g0 + t.mono.grade() > max_grade) continue;
    tmp = scale * t.coef;
    add(m * t.mono, tmp);
  }
}

void PolyBuilder::add_product(const Poly& a, const Poly& b, int max_grade, const Rational& scale) {
  if (a.is_zero() || b.is_zero() || scale == 0) return;
  std::vector<int> gb(b.size());
  for (size_t j = 0; j < b.size(); ++j) gb[j] = b.terms()[j].mono.grade();
  Rational tmp;
  for (const auto& ta : a.terms()) {
    int ga = ta.mono.grade();
    if (max_grade >= 0 && ga > max_grade) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (max_grade >= 0 && ga + gb[j] > max_grade) continue;
      tmp = ta.coef * b.terms()[j].coef;
      if (scale != 1) tmp *= scale;
      add(ta.mono * b.terms()[j].mono, tmp);
    }
  }
}

bool PolyBuilder::empty() const { return acc_.empty(); }

Poly PolyBuilder::build() {
  std::vector<Term> terms;
  terms.reserve(acc_.size());
  for (auto& [m, c] : acc_)
    if (c != 0) terms.push_back({m, std::move(c)});
  acc_.clear();
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.mono < y.mono; });
  return Poly::from_terms(std::move(terms));
}

// ---------------------------------------------------------------- variable helpers

namespace {
Var make_var(Family f, int internal, int form, std::initializer_list<int> dirs) {
  if (internal < 0 || internal >= kMaxInternal) throw PreconditionError("internal index out of range");
  Var v;
  v.family = f;
  v.internal = internal;
  v.form = form;
  for (int d : dirs) ++v.counts.at(d);
  if (v.order() > dmax()) throw DerivativeOrderOverflow("variable exceeds D_max");
  return v;
}
}  // namespace

Poly A(int a, int mu) { return Poly::variable(make_var(Family::A, a, mu, {})); }
Poly dA(int a, int mu, std::initializer_list<int> dirs) { return Poly::variable(make_var(Family::A, a, mu, dirs)); }
Poly zeta(int s, int a) { return Poly::variable(make_var(zeta_family(s), a, 0, {})); }
Poly dzeta(int s, int a, std::initializer_list<int> dirs) { return Poly::variable(make_var(zeta_family(s), a, 0, dirs)); }
Poly rigid(int a) { return Poly::variable(make_var(Family::Rigid, a, 0, {})); }
Poly x(int mu) {
  Var v;
  v.family = Family::X;
  v.form = mu;
  return Poly::variable(v);
}

// ---------------------------------------------------------------- background

int Background::eps_lower(int mu, int nu, int al) {
  if (mu == nu || nu == al || mu == al) return 0;
  return ((nu - mu + 3) % 3 == 1) ? 1 : -1;
}

Rational Background::v2_lower(int mu, int nu) const {
  Rational s = 0;
  for (int al = 0; al < kDim; ++al) s += eps_lower(mu, nu, al) * v[al];
  return s;
}

Rational Background::v2_upper(int mu, int nu) const {
  Rational s = 0;
  for (int al = 0; al < kDim; ++al) s += eps_upper(mu, nu, al) * v_lower(al);
  return s;
}

Rational Background::v2_mixed(int mu, int nu) const { return eta(mu, mu) * v2_upper(mu, nu); }

// ---------------------------------------------------------------- variations

bool FieldVariation::is_zero() const {
  return std::all_of(comp_.begin(), comp_.end(), [](const Poly& p) { return p.is_zero(); });
}

std::vector<Family> FieldVariation::parameter_families() const {
  std::set<Family> fams;
  for (const auto& p : comp_)
    for (const auto& t : p.terms())
      for (uint32_t k : t.mono) {
        Family f = key_family(k);
        if (is_parameter(f) || f == Family::Rigid) fams.insert(f);
      }
  return {fams.begin(), fams.end()};
}

FieldVariation FieldVariation::grade_part(int g) const {
  return map([g](const Poly& p) { return p.grade_part(g); });
}

FieldVariation FieldVariation::truncate(int max_grade) const {
  return map([max_grade](const Poly& p) { return p.truncate(max_grade); });
}

int FieldVariation::max_grade() const {
  int g = -1;
  for (const auto& p : comp_) g = std::max(g, p.max_grade());
  return g;
}

FieldVariation FieldVariation::operator+(const FieldVariation& o) const {
  FieldVariation r = *this;
  for (size_t i = 0; i < comp_.size(); ++i) r.comp_[i] += o.comp_[i];
  return r;
}

FieldVariation FieldVariation::operator-(const FieldVariation& o) const {
  FieldVariation r = *this;
  for (size_t i = 0; i < comp_.size(); ++i) r.comp_[i] -= o.comp_[i];
  return r;
}

FieldVariation FieldVariation::map(const std::function<Poly(const Poly&)>& f) const {
  FieldVariation r(n_);
  for (size_t i = 0; i < comp_.size(); ++i) r.comp_[i] = f(comp_[i]);
  return r;
}

GaugeVariation::GaugeVariation(FieldVariation v, Family family) : v_(std::move(v)), family_(family) {
  if (!is_parameter(family)) throw PreconditionError("gauge variation family must be a parameter family");
  for (int i = 0; i < v_.size(); ++i)
    for (const auto& t : v_.flat(i).terms()) {
      int deg = 0;
      for (uint32_t k : t.mono) {
        Family f = key_family(k);
        if (f == family) {
          ++deg;
          if (key_order(k) > 1) throw PreconditionError("gauge variation: parameter derivative order exceeds 1");
        } else if (is_parameter(f) || f == Family::Rigid) {
          throw PreconditionError("gauge variation: foreign parameter family present");
        }
      }
      if (deg != 1) throw PreconditionError("gauge variation must be linear in its parameter family");
    }
}

GaugeVariation GaugeVariation::with_family(Family f) const {
  if (f == family_) return *this;
  uint32_t from = static_cast<uint32_t>(family_), to = static_cast<uint32_t>(f);
  auto remap = [from, to](uint32_t k) {
    if ((k >> 24) == from) return (k & 0x00FFFFFFu) | (to << 24);
    return k;
  };
  return GaugeVariation(v_.map([&](const Poly& p) { return p.map_keys(remap); }), f);
}

GaugeVariation GaugeVariation::truncate(int max_grade) const {
  GaugeVariation g = *this;
  g.v_ = v_.truncate(max_grade);
  return g;
}

GaugeVariation GaugeVariation::grade_part(int gr) const {
  GaugeVariation g = *this;
  g.v_ = v_.grade_part(gr);
  return g;
}

FieldVariation GaugeVariation::with_parameter(const std::vector<Poly>& Z) const {
  FieldVariation out(n());
  std::map<uint32_t, Poly> cache;
  auto dZ = [&](uint32_t k) -> const Poly& {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    Var v = Var::from_key(k);
    return cache[k] = total_derivative(Z.at(v.internal), v.counts);
  };
  for (int i = 0; i < v_.size(); ++i) {
    PolyBuilder pb;
    for (const auto& t : v_.flat(i).terms()) {
      for (int j = 0; j < t.mono.degree(); ++j)
        if (key_family(t.mono[j]) == family_) {
          pb.add_product(t.mono.without(j), t.coef, dZ(t.mono[j]));
          break;
        }
    }
    out.flat(i) = pb.build();
  }
  return out;
}

FieldVariation GaugeVariation::rigid() const {
  uint32_t fam = static_cast<uint32_t>(family_);
  auto remap = [fam](uint32_t k) -> uint32_t {
    if ((k >> 24) != fam) return k;
    if (key_order(k) > 0) return 0;
    Var v = Var::from_key(k);
    v.family = Family::Rigid;
    return v.key();
  };
  return v_.map([&](const Poly& p) { return p.map_keys(remap); });
}

GaugeVariation abelian_variation(int n, Family f) {
  FieldVariation v(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < kDim; ++mu) {
      Var z;
      z.family = f;
      z.internal = a;
      z.counts[mu] = 1;
      v(a, mu) = Poly::variable(z);
    }
  return GaugeVariation(v, f);
}

}  // namespace deformatics::jet
