#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "phytotron/kv.hpp"
#include "phytotron/params.hpp"
#include "support/tmpfile.hpp"

using namespace phyto;
using testsup::TmpFile;

TEST_CASE("key-value parsing basics") {
  TmpFile f(
      "a = 1.5\n"
      "# full-line comment\n"
      "b = 2e-3  # trailing comment\n"
      "\n"
      "name = \"quoted value\"\n"
      "bare = text\n");
  const auto kv = KeyValueFile::load(f.path());
  CHECK(kv.get_double("a") == 1.5);
  CHECK(kv.get_double("b") == 2e-3);
  CHECK(kv.get_string("name") == "quoted value");
  CHECK(kv.get_string("bare") == "text");
  CHECK(kv.get_double_or("missing", 7.0) == 7.0);
  CHECK_FALSE(kv.has("missing"));
}

TEST_CASE("key-value parse errors carry file and line") {
  TmpFile f("ok = 1\nbroken line without equals\n");
  try {
    KeyValueFile::load(f.path());
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);
  }
}

TEST_CASE("duplicate keys rejected") {
  TmpFile f("a = 1\na = 2\n");
  CHECK_THROWS_WITH(KeyValueFile::load(f.path()),
                    Catch::Matchers::ContainsSubstring("duplicate key 'a'"));
}

TEST_CASE("non-numeric value for numeric key") {
  TmpFile f("a = notanumber\n");
  const auto kv = KeyValueFile::load(f.path());
  CHECK_THROWS_WITH(kv.get_double("a"), Catch::Matchers::ContainsSubstring("'a'"));
}

TEST_CASE("default parameter file loads and validates") {
  const ModelParams p = ModelParams::load(testsup::default_params_path());
  CHECK(p.k_alpha == 1.25);
  CHECK(p.k_V == 24.0);
  CHECK(p.k_Qm[3] == 30.0);
  CHECK(p.eta_LU[0] == 0.95);
  CHECK(p.k_uW == 2.0e-3);
  CHECK(p.k_W_evap == 0.0);  // zero allowed for this key
  CHECK(p.plant.k_p2 == 2.3e-4);
  CHECK(p.plant.k_Bresp == 0.68);
  CHECK(p.condensation_gain() == Catch::Approx(1.000381080339e-4).epsilon(1e-10));
}

namespace {

// Copy of the default file with one key's line transformed.
std::string default_file_with(const std::string& key, const std::string& replacement) {
  std::ifstream in(testsup::default_params_path());
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    std::string k = eq == std::string::npos ? "" : line.substr(0, eq);
    while (!k.empty() && (k.back() == ' ' || k.back() == '\t')) k.pop_back();
    if (k == key)
      out << replacement << '\n';
    else
      out << line << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("missing parameter key is a startup error naming the key") {
  TmpFile f(default_file_with("k_leak", "# k_leak removed"));
  CHECK_THROWS_WITH(ModelParams::load(f.path()),
                    Catch::Matchers::ContainsSubstring("k_leak"));
}

TEST_CASE("non-positive physical constant rejected") {
  TmpFile f(default_file_with("k_V_chm", "k_V_chm = 0.0"));
  CHECK_THROWS_WITH(ModelParams::load(f.path()),
                    Catch::Matchers::ContainsSubstring("k_V_chm"));
}

TEST_CASE("missing plant key names the prefixed key") {
  TmpFile f(default_file_with("plant.k_Gamma", "# removed"));
  CHECK_THROWS_WITH(ModelParams::load(f.path()),
                    Catch::Matchers::ContainsSubstring("plant.k_Gamma"));
}
