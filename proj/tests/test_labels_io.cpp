#include <filesystem>
#include <set>

#include "doctest.h"
#include "hfscreen/errors.hpp"
#include "hfscreen/io.hpp"
#include "hfscreen/labels.hpp"
#include "hfscreen/rng.hpp"

using namespace hfscreen;

TEST_CASE("fine colors collapse onto the three coarse classes") {
  CHECK(coarse_of(Fine::Green) == Coarse::Green);
  CHECK(coarse_of(Fine::Orange) == Coarse::Orange);
  for (Fine f : {Fine::Grey, Fine::Red, Fine::Purple}) CHECK(coarse_of(f) == Coarse::Other);

  const ColorLabel purple(Fine::Purple);
  CHECK(purple.coarse() == Coarse::Other);
  CHECK(purple.fine() == Fine::Purple);
  CHECK_FALSE(ColorLabel(Coarse::Green).fine().has_value());
}

TEST_CASE("label names round-trip and unknown names are rejected") {
  for (Fine f : kAllFine) CHECK(parse_fine(to_string(f)) == f);
  for (Coarse c : kAllCoarse) CHECK(parse_coarse(to_string(c)) == c);
  CHECK(parse_fine("gray") == Fine::Grey);
  CHECK_THROWS_AS(parse_fine("blue"), DataError);
}

TEST_CASE("rng is reproducible and bounded") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);

  Rng r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.below(7);
    CHECK(v < 7);
    seen.insert(v);
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("shuffle is a permutation") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Rng r(9);
  r.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("fnv1a matches the published 64-bit test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("atomic write round-trips and leaves no temp file") {
  const auto dir = std::filesystem::temp_directory_path() / "hfscreen_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  write_file_atomic(path, "again");
  CHECK(read_file(path) == "again");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), DataError);
  std::filesystem::remove_all(dir);
}
