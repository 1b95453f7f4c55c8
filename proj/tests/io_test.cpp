#include <gtest/gtest.h>

#include <random>

#include "oamspec/io.hpp"

using namespace oamspec;
using nlohmann::json;

TEST(CountsJson, RoundTripIsExact) {
  const auto c = simulate_counts(mes(3), MUBSet(3), 1e4, 42, Noise::Poisson);
  const json j = to_json(c);
  EXPECT_EQ(j["schemaVersion"], 1);
  const auto back = counts_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.d, 3);
  EXPECT_EQ(back.N, c.N);
  EXPECT_EQ(back.counts, c.counts);
  EXPECT_EQ(back.settings, c.settings);
  ASSERT_TRUE(back.seed.has_value());
  EXPECT_EQ(*back.seed, 42u);
  EXPECT_EQ(back.noise, Noise::Poisson);
}

TEST(CountsJson, NoiselessDoublesSurviveText) {
  const auto c = simulate_counts(mes(3), MUBSet(3), 1234.5, 0, Noise::None);
  const auto back = counts_from_json(json::parse(to_json(c).dump()));
  EXPECT_EQ(back.counts, c.counts);
  EXPECT_FALSE(back.seed.has_value());
}

TEST(CountsJson, ErrorsNameTheField) {
  json j = to_json(simulate_counts(mes(3), MUBSet(3), 10, 0, Noise::None));
  auto field_of = [](const json& doc) {
    try {
      counts_from_json(doc);
    } catch (const SchemaError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  json a = j;
  a.erase("N");
  EXPECT_EQ(field_of(a), "N");
  json b = j;
  b["schemaVersion"] = 2;
  EXPECT_EQ(field_of(b), "schemaVersion");
  json c = j;
  c["settings"][3] = "x";
  EXPECT_EQ(field_of(c), "settings[3]");
  json d = j;
  d["noise"] = "gaussian";
  EXPECT_EQ(field_of(d), "noise");
  json e = j;
  e["counts"].push_back(1.0);
  EXPECT_EQ(field_of(e), "counts");
}

TEST(DensityJson, RoundTrip) {
  std::mt19937_64 rng(9);
  const auto r = random_mixed_state(3, 4, rng);
  const json j = to_json(r);
  EXPECT_EQ(j["kind"], "density_matrix");
  EXPECT_NE(j["basisOrder"].get<std::string>().find("n_s*3 + n_i"), std::string::npos);
  const auto back = density_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.rho, r.rho);
}

TEST(DensityJson, ShapeErrors) {
  json j = to_json(mes(3));
  j["real"].erase(0);
  EXPECT_THROW(density_from_json(j), SchemaError);
  json k = to_json(mes(3));
  k["imag"][2][2] = "0";
  try {
    density_from_json(k);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "imag[2][2]");
  }
}
