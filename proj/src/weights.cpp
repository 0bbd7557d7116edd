#include <cmath>
#include <numeric>
#include <vector>

#include "asymptotica/operators.hpp"

namespace asymptotica {

std::vector<double> WeightSchedule::truncated(std::size_t count) const {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    out.push_back(generator(i));
  }
  return out;
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) {
    throw Error("Rational: zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  const std::int64_t g = std::gcd(den, o.den);
  const std::int64_t l = den / g;
  return Rational(num * (o.den / g) + o.num * l, l * o.den);
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  const __int128 lhs = static_cast<__int128>(num) * o.den;
  const __int128 rhs = static_cast<__int128>(o.num) * den;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::uint64_t nk_sequence(std::size_t k) {
  if (k == 0) {
    throw Error("nk_sequence: k must be at least 1");
  }
  std::uint64_t n = 1;
  for (std::size_t j = 1; j < k; ++j) {
    unsigned __int128 next = 3 * static_cast<unsigned __int128>(n) +
                             2 * static_cast<unsigned __int128>(n) * n;
    if (next > std::numeric_limits<std::uint64_t>::max()) {
      throw Error("nk_sequence: N_" + std::to_string(k) + " overflows 64 bits");
    }
    n = static_cast<std::uint64_t>(next);
  }
  return n;
}

namespace {

// Segment of index i >= 2: the k with N_k < i <= N_{k+1}.
std::uint64_t example1_segment_base(std::size_t i) {
  std::uint64_t nk = 1;
  for (;;) {
    const std::uint64_t next = 3 * nk + 2 * nk * nk;
    if (i <= next) {
      return nk;
    }
    nk = next;
  }
}

}  // namespace

Rational example1_log2_weight(std::size_t i) {
  if (i == 0) {
    throw Error("example1_log2_weight: indices start at 1");
  }
  if (i == 1) {
    return Rational(0);
  }
  const std::uint64_t nk = example1_segment_base(i);
  if (i <= 3 * nk) {
    return Rational(-1);
  }
  return Rational(1, static_cast<std::int64_t>(nk));
}

WeightSchedule example1_weights() {
  return {[](std::size_t i) {
            if (i == 1) {
              return 1.0;
            }
            const std::uint64_t nk = example1_segment_base(i);
            if (i <= 3 * nk) {
              return 0.5;
            }
            return std::exp2(1.0 / static_cast<double>(nk));
          },
          "example1: w_1=1, 1/2 on (N_k,3N_k], 2^(1/N_k) on (3N_k,N_{k+1}]"};
}

std::vector<double> example1_weights(std::size_t count) {
  return example1_weights().truncated(count);
}

WeightSchedule example3_weights(std::size_t n) {
  if (n == 0) {
    throw Error("example3_weights: n must be at least 1");
  }
  const double base = 1.0 / static_cast<double>(n);
  return {[base](std::size_t i) {
            if (i <= 2) {
              return 1.0;
            }
            const double di = static_cast<double>(i);
            return std::pow(base, 1.0 / (di - 1.0) - 1.0 / di);
          },
          "example3: n=" + std::to_string(n)};
}

WeightSchedule constant_weights(double value) {
  if (!(value > 0.0)) {
    throw Error("constant_weights: weights must be positive");
  }
  return {[value](std::size_t) { return value; },
          "constant " + std::to_string(value)};
}

WeightSchedule list_weights(std::vector<double> values) {
  for (double v : values) {
    if (!(v > 0.0)) {
      throw Error("list_weights: weights must be positive");
    }
  }
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  return {[shared](std::size_t i) {
            if (i == 0 || i > shared->size()) {
              throw Error("list_weights: index " + std::to_string(i) +
                          " beyond the " + std::to_string(shared->size()) +
                          " given weights");
            }
            return (*shared)[i - 1];
          },
          "list of " + std::to_string(shared->size())};
}

}  // namespace asymptotica
