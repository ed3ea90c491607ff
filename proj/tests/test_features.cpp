// Copyright 2026 The ContextCurate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "contextcurate/features.hpp"
#include "contextcurate/rng.hpp"

using namespace ctxcur;

TEST_CASE("load well-formed feature table") {
  const FeatureTable t = parse_features("id,f_1,f_2\na,1,2\nb,3,4\nc,5,6.5\n");
  CHECK(t.width() == 2);
  CHECK(t.rows.size() == 3);
  CHECK(t.rows.at("c")[1] == 6.5);
  CHECK(t.missing.empty());
}

TEST_CASE("missing cell imputed to column mean with a warning") {
  Diagnostics diag;
  const FeatureTable t = parse_features("id,f_1,f_2\na,1,2\nb,,4\nc,5,6\n", &diag);
  CHECK(t.rows.at("b")[0] == 3.0);
  CHECK(t.is_missing("b", 0));
  CHECK_FALSE(t.is_missing("b", 1));
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("malformed feature files") {
  CHECK_THROWS_AS(parse_features("id,f_1,f_2\na,1,2\nb,3\n"), LoadError);
  CHECK_THROWS_AS(parse_features("id,f_1\na,x\n"), LoadError);
  CHECK_THROWS_AS(parse_features("id,f_1\na,1\na,2\n"), LoadError);
}

TEST_CASE("fit_normalizer uses training rows only") {
  const FeatureTable t = parse_features("id,f_1,f_2\na,1,5\nb,3,5\nc,100,5\nd,7,5\n");
  const NormStats s = fit_normalizer(t, {"a", "b"});
  CHECK(s.mean[0] == 2.0);
  CHECK(s.sd[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.fitted_on == 2);
  CHECK(s.zero_variance(1));
  const NormStats three = fit_normalizer(t, {"a", "b", "d"});
  CHECK(three.zero_variance(1));
  CHECK(three.mean[0] != fit_normalizer(t, {"a", "b", "c"}).mean[0]);
  CHECK_THROWS_AS(fit_normalizer(t, {"a"}), InputError);
  CHECK_THROWS_AS(fit_normalizer(t, {"a", "zz"}), InputError);
}

TEST_CASE("apply_normalizer identities") {
  NormStats s{{2.0, 5.0, -1.0}, {1.5, 0.0, 2.0}, 10};
  const auto centered = apply_normalizer(s, std::vector<double>{2.0, 5.0, -1.0});
  for (double v : centered) CHECK(v == 0.0);
  const auto unit = apply_normalizer(s, std::vector<double>{3.5, 123.0, 1.0});
  CHECK(unit[0] == 1.0);
  CHECK(unit[1] == 0.0);
  CHECK(unit[2] == 1.0);
  CHECK_THROWS_AS(apply_normalizer(s, std::vector<double>{1.0}), InputError);
}

TEST_CASE("apply_normalizer is affine per coordinate") {
  Rng rng(3);
  NormStats s{{0.3, -2.0}, {1.7, 0.4}, 5};
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> v{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const double a = rng.uniform(-3, 3);
    const double b = rng.uniform(-3, 3);
    std::vector<double> w(2);
    for (int j = 0; j < 2; ++j) w[j] = a * v[j] + b;
    const auto nv = apply_normalizer(s, v);
    const auto nw = apply_normalizer(s, w);
    for (int j = 0; j < 2; ++j) {
      const double expected = a * nv[j] + ((a - 1.0) * s.mean[j] + b) / s.sd[j];
      CHECK(nw[j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalized rows put missing cells at the training mean") {
  const FeatureTable t = parse_features("id,f_1\na,1\nb,3\nc,\n");
  const NormStats s = fit_normalizer(t, {"a", "b"});
  CHECK(normalized_row(s, t, "c")[0] == 0.0);
  CHECK(normalized_row(s, t, "b")[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("norm stats round trip") {
  NormStats s{{0.1, 1.0 / 3.0}, {2.5, 0.0}, 17};
  const NormStats back = parse_norm_stats(to_csv(s, {"f_1", "f_2"}));
  CHECK(back.mean == s.mean);
  CHECK(back.sd == s.sd);
  CHECK(back.fitted_on == 17);
}

TEST_CASE("feature table round trip") {
  const FeatureTable t = parse_features("id,f_1,f_2\na,0.1,2\nb,3,1e-7\n");
  const FeatureTable back = parse_features(to_csv(t));
  CHECK(back.rows == t.rows);
  CHECK(back.feature_names == t.feature_names);
}
