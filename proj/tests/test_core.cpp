#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mifo/csv.hpp"
#include "mifo/error.hpp"
#include "mifo/metrics.hpp"
#include "mifo/missing.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace mifo;
using testing_util::NA;

namespace {

DataMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "NA", "test.csv");
}

}  // namespace

TEST_SUITE("data matrix") {
  TEST_CASE("rejects degenerate shapes and bad names") {
    CHECK_THROWS_AS(DataMatrix(Matrix::Zero(1, 3), default_column_names(3)), DataError);
    CHECK_THROWS_AS(DataMatrix(Matrix::Zero(3, 2), {"a", "a"}), DataError);
    CHECK_THROWS_AS(DataMatrix(Matrix::Zero(3, 2), {"a", ""}), DataError);
    CHECK_THROWS_AS(DataMatrix(Matrix::Zero(3, 2), {"a"}), DataError);
  }

  TEST_CASE("masked reads are errors") {
    const auto m = testing_util::with_nan_mask(testing_util::to_matrix({{1, NA}, {3, 4}}));
    CHECK(m.is_missing(0, 1));
    CHECK_THROWS_AS(m.at(0, 1), MaskedAccessError);
    CHECK(m.at(1, 1) == 4.0);
    CHECK(m.total_missing() == 1);
  }

  TEST_CASE("column split partitions the rows") {
    const auto m = testing_util::with_nan_mask(testing_util::to_matrix({{1, NA}, {2, 5}, {3, NA}}));
    const auto s = m.split(1);
    CHECK(s.rows_obs == std::vector<std::size_t>{1});
    CHECK(s.rows_mis == std::vector<std::size_t>{0, 2});
  }
}

TEST_SUITE("csv") {
  TEST_CASE("parses NA into the mask") {
    const auto m = parse("a,b\n1,2\n3,NA\n");
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m.total_missing() == 1);
    CHECK(m.is_missing(1, 1));
    CHECK(m.at(1, 0) == 3.0);
  }

  TEST_CASE("rejects a fully missing column") {
    CHECK_THROWS_WITH_AS(parse("a,b\n1,NA\n2,NA\n"), doctest::Contains("column \"b\" is fully missing"),
                         DataError);
  }

  TEST_CASE("reports row and field of a parse failure") {
    try {
      parse("a\n1\nx\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
      CHECK(e.col() == 1);
      CHECK(e.field() == "x");
    }
  }

  TEST_CASE("rejects ragged rows and duplicate names") {
    CHECK_THROWS_AS(parse("a,b\n1,2\n3\n"), DataError);
    CHECK_THROWS_AS(parse("a,a\n1,2\n3,4\n"), DataError);
    CHECK_THROWS_AS(parse(""), DataError);
  }

  TEST_CASE("accepts CRLF line endings") {
    const auto m = parse("a,b\r\n1,2\r\n3,4\r\n");
    CHECK(m.at(1, 1) == 4.0);
  }

  TEST_CASE("writes the NA token only at masked positions") {
    const auto m = testing_util::with_nan_mask(testing_util::to_matrix({{1, NA}, {3, 4}}));
    std::ostringstream out;
    write_csv(m, out);
    CHECK(out.str() == "x1,x2\n1,NA\n3,4\n");

    const auto full = testing_util::random_matrix(3, 2, 1);
    std::ostringstream out2;
    write_csv(full, out2);
    CHECK(out2.str().find("NA") == std::string::npos);
  }

  TEST_CASE("round trip is bit-exact for random matrices") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::bernoulli_distribution miss(0.2);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix v(5, 3);
      Mask mask(5, 3);
      for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
          v(i, j) = u(rng) * std::pow(10.0, static_cast<double>(trial % 7) - 3);
          mask(i, j) = i > 0 && miss(rng);  // row 0 always observed
        }
      }
      const DataMatrix m(v, mask, {"a", "b", "c"});
      std::stringstream buf;
      write_csv(m, buf);
      const auto back = parse_csv(buf);
      CHECK(identical(m, back));
    }
  }

  TEST_CASE("file round trip and positions file") {
    const auto dir = std::filesystem::temp_directory_path() / "mifo_test_csv";
    std::filesystem::create_directories(dir);
    const auto m = testing_util::random_matrix(5, 3, 7);
    write_csv(m, dir / "m.csv");
    CHECK(identical(load_csv(dir / "m.csv"), m));

    const std::vector<Cell> cells{{0, 1}, {4, 2}};
    write_positions(cells, dir / "p.csv");
    CHECK(load_positions(dir / "p.csv") == cells);
    CHECK_THROWS_AS(load_csv(dir / "missing.csv"), DataError);
  }
}

TEST_SUITE("inject") {
  TEST_CASE("count is floor(f * n * p)") {
    // Enumerated: floor(0.1 * 20) = 2.
    const auto m = testing_util::random_matrix(4, 5, 3);
    const auto pair = inject_missing(m, 0.10, 11);
    CHECK(pair.injected.size() == 2);
    CHECK(pair.observed.total_missing() == 2);
    for (std::size_t n : {3u, 7u, 10u}) {
      for (std::size_t p : {2u, 5u, 9u}) {
        for (double f : {0.05, 0.1, 0.2, 0.29, 0.3}) {
          std::size_t expected = 0;
          // Enumerate: largest k with k <= f * n * p, using exact rational comparison k*100 <= F*n*p.
          const auto f100 = static_cast<std::size_t>(std::llround(f * 100));
          while ((expected + 1) * 100 <= f100 * n * p) ++expected;
          CHECK(injection_count(f, n, p) == expected);
        }
      }
    }
  }

  TEST_CASE("deterministic in the seed") {
    const auto m = testing_util::random_matrix(4, 5, 3);
    CHECK(inject_missing(m, 0.1, 5).injected == inject_missing(m, 0.1, 5).injected);
  }

  TEST_CASE("every column keeps at least two observed entries") {
    const auto m = testing_util::random_matrix(10, 10, 4);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto pair = inject_missing(m, 0.30, seed);
      REQUIRE(pair.injected.size() == 30);
      // Brute force count per column from the position list.
      std::vector<int> per_col(10, 0);
      for (const auto& c : pair.injected) ++per_col[c.col];
      for (int k : per_col) CHECK(10 - k >= 2);
      // Position list equals the mask, truth agrees off the mask.
      CHECK(pair.observed.missing_cells() == pair.injected);
      for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 10; ++c)
          if (!pair.observed.is_missing(r, c)) CHECK(pair.observed.at(r, c) == pair.truth.at(r, c));
    }
  }

  TEST_CASE("rejects bad fractions and impossible requests") {
    const auto m = testing_util::random_matrix(4, 5, 3);
    CHECK_THROWS_AS(inject_missing(m, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(inject_missing(m, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(inject_missing(m, 0.01, 1), ParameterError);  // floor(0.2) = 0
    CHECK_THROWS_AS(inject_missing(m, 0.9, 1), ParameterError);   // cannot keep 2 per column
    const auto masked = inject_missing(m, 0.1, 1).observed;
    CHECK_THROWS_AS(inject_missing(masked, 0.1, 1), DataError);
  }
}

TEST_SUITE("metrics") {
  DataMatrix column(std::initializer_list<double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) m(i++, 0) = v;
    return DataMatrix(m, {"a"});
  }

  TEST_CASE("nrmse worked values") {
    const std::vector<Cell> pos{{0, 0}, {1, 0}};
    CHECK(nrmse(column({1, 4}), column({1, 4}), pos) == 0.0);
    // MSE = 1, population variance of {1, 4} = 2.25.
    CHECK(nrmse(column({1, 4}), column({2, 3}), pos) == doctest::Approx(std::sqrt(1.0 / 2.25)).epsilon(1e-12));
    CHECK(nrmse(column({1, 4}), column({2, 3}), pos) == doctest::Approx(0.666667).epsilon(1e-6));
    CHECK_THROWS_AS(nrmse(column({5, 5}), column({1, 2}), pos), ComputeError);
    CHECK_THROWS_AS(nrmse(column({1, 4}), column({1, 4}), {}), ParameterError);
  }

  TEST_CASE("nmae worked values") {
    // True column spans [0, 10]; rows 1 and 2 (values 2, 4) are imputed as 3, 6.
    const auto truth = column({0, 2, 4, 10});
    const auto imputed = column({0, 3, 6, 10});
    const auto r = nmae(truth, imputed, {{1, 0}, {2, 0}});
    REQUIRE(r.per_col[0].has_value());
    CHECK(*r.per_col[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(r.overall == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(nmae(truth, truth, {{1, 0}}).overall == 0.0);
    CHECK_THROWS_AS(nmae(column({3, 3, 3}), column({1, 2, 3}), {{0, 0}}), ComputeError);
  }

  TEST_CASE("nmae overall averages affected columns only") {
    Matrix t(3, 3);
    t << 0, 0, 0, 5, 10, 1, 10, 20, 2;
    Matrix i = t;
    i(1, 0) = 6;   // |1| / 10 = 0.1
    i(1, 1) = 16;  // |6| / 20 = 0.3
    const auto r = nmae(DataMatrix(t, {"a", "b", "c"}), DataMatrix(i, {"a", "b", "c"}), {{1, 0}, {1, 1}});
    CHECK(*r.per_col[0] == doctest::Approx(0.1));
    CHECK(*r.per_col[1] == doctest::Approx(0.3));
    CHECK_FALSE(r.per_col[2].has_value());
    CHECK(r.overall == doctest::Approx(0.2));
  }

  TEST_CASE("match the brute-force oracle on random instances") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> count(2, 10);
    for (int trial = 0; trial < 200; ++trial) {
      Matrix t(6, 4);
      Matrix im(6, 4);
      for (Eigen::Index a = 0; a < 6; ++a)
        for (Eigen::Index b = 0; b < 4; ++b) {
          t(a, b) = normal(rng);
          im(a, b) = t(a, b) + 0.5 * normal(rng);
        }
      std::vector<std::size_t> slots(24);
      std::iota(slots.begin(), slots.end(), 0);
      std::shuffle(slots.begin(), slots.end(), rng);
      std::vector<Cell> pos;
      std::vector<oracle::Entry> entries;
      for (int k = 0; k < count(rng); ++k) {
        const Cell c{slots[k] / 4, slots[k] % 4};
        pos.push_back(c);
        entries.push_back({c.row, c.col, t(c.row, c.col), im(c.row, c.col)});
      }
      std::vector<std::vector<double>> cols(4);
      for (Eigen::Index b = 0; b < 4; ++b)
        for (Eigen::Index a = 0; a < 6; ++a) cols[b].push_back(t(a, b));
      const DataMatrix truth(t, default_column_names(4));
      const DataMatrix imputed(im, default_column_names(4));

      const double expected_nrmse = oracle::nrmse(entries);
      CHECK(nrmse(truth, imputed, pos) == doctest::Approx(expected_nrmse).epsilon(1e-12));
      const auto [per_col, overall] = oracle::nmae(entries, cols);
      const auto got = nmae(truth, imputed, pos);
      CHECK(got.overall == doctest::Approx(overall).epsilon(1e-12));
      for (const auto& [k, v] : per_col) CHECK(*got.per_col[k] == doctest::Approx(v).epsilon(1e-12));
    }
  }

  TEST_CASE("invariant under a consistent row permutation") {
    const auto truth = testing_util::random_matrix(8, 3, 5);
    const auto pair = inject_missing(truth, 0.3, 9);
    Matrix im = truth.dense();
    for (const auto& c : pair.injected) im(c.row, c.col) += 0.3;
    const DataMatrix imputed(im, truth.col_names());

    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix tp(8, 3);
    Matrix ip(8, 3);
    std::vector<std::size_t> where(8);
    for (std::size_t i = 0; i < 8; ++i) {
      tp.row(i) = truth.dense().row(perm[i]);
      ip.row(i) = im.row(perm[i]);
      where[perm[i]] = i;
    }
    std::vector<Cell> pp;
    for (const auto& c : pair.injected) pp.push_back({where[c.row], c.col});
    const DataMatrix tpm(tp, truth.col_names());
    const DataMatrix ipm(ip, truth.col_names());
    CHECK(nrmse(tpm, ipm, pp) == doctest::Approx(nrmse(truth, imputed, pair.injected)).epsilon(1e-12));
    CHECK(nmae(tpm, ipm, pp).overall ==
          doctest::Approx(nmae(truth, imputed, pair.injected).overall).epsilon(1e-12));
  }
}
