// Copyright 2026 The binmut Authors
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

#include "binmut/forge.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "binmut/bytes.hpp"
#include "support/testutil.hpp"

using namespace binmut;
using namespace binmut::testing;

namespace {

std::vector<uint32_t> iota_ids(uint32_t n) {
  std::vector<uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

TEST_CASE("an under-threshold population is returned whole") {
  auto picked = sample_ids(iota_ids(641), {42, 1000});
  CHECK(picked == iota_ids(641));
  // Exactly at the threshold as well.
  CHECK(sample_ids(iota_ids(1000), {42, 1000}).size() == 1000);
}

TEST_CASE("sampling draws the requested count without replacement") {
  auto picked = sample_ids(iota_ids(5000), {42, 1000});
  REQUIRE(picked.size() == 1000);
  CHECK(std::is_sorted(picked.begin(), picked.end()));
  std::set<uint32_t> unique(picked.begin(), picked.end());
  CHECK(unique.size() == picked.size());
  for (uint32_t id : picked) CHECK(id < 5000);

  CHECK(sample_ids(iota_ids(5000), {42, 1}).size() == 1);
}

TEST_CASE("sampling is deterministic and seed-sensitive") {
  auto first = sample_ids(iota_ids(2000), {42, 200});
  auto second = sample_ids(iota_ids(2000), {42, 200});
  CHECK(first == second);
  auto other_seed = sample_ids(iota_ids(2000), {43, 200});
  CHECK(first != other_seed);
}

TEST_CASE("sampling ignores input order") {
  auto ids = iota_ids(3000);
  auto baseline = sample_ids(ids, {7, 100});
  std::mt19937_64 rng(99);
  std::shuffle(ids.begin(), ids.end(), rng);
  CHECK(sample_ids(ids, {7, 100}) == baseline);
}

TEST_CASE("sampling handles sparse id sets") {
  std::vector<uint32_t> ids = {500, 7, 120000, 3, 42};
  auto picked = sample_ids(ids, {42, 3});
  REQUIRE(picked.size() == 3);
  CHECK(std::is_sorted(picked.begin(), picked.end()));
  for (uint32_t id : picked) {
    CHECK(std::count(ids.begin(), ids.end(), id) == 1);
  }
}

TEST_CASE("sampling spreads across the population") {
  // Deterministic given the seed; a heavily skewed selection would mean
  // the index math is biased toward one end.
  auto picked = sample_ids(iota_ids(1000), {42, 500});
  double mean = 0;
  for (uint32_t id : picked) mean += id;
  mean /= double(picked.size());
  CHECK(mean > 450.0);
  CHECK(mean < 550.0);
}

TEST_CASE("an empty population cannot be sampled") {
  CHECK_THROWS_AS(sample_ids({}, {42, 10}), EmptyPopulationError);
}

TEST_CASE("record sampling selects whole records by id") {
  LoadedBinary binary = load_binary(corpus_binary("abs-O0"));
  auto mutants = enumerate_all(binary);
  std::vector<MutantRecord> records;
  for (const Mutant& m : mutants) records.push_back(to_record(m));

  auto picked = sample_records(records, {42, 10});
  REQUIRE(picked.size() == 10);
  for (size_t i = 1; i < picked.size(); ++i) {
    CHECK(picked[i - 1].mutant_id < picked[i].mutant_id);
  }
  for (const MutantRecord& rec : picked) {
    CHECK(rec == records.at(rec.mutant_id));
  }
}

TEST_CASE("emitted mutants differ exactly inside the patch window") {
  LoadedBinary binary = load_binary(corpus_binary("abs-O0"));
  auto mutants = enumerate_all(binary);
  REQUIRE(!mutants.empty());
  TempDir tmp;

  for (const Mutant& m : mutants) {
    MutantRecord rec = to_record(m);
    auto path = emit_mutant(binary, rec, tmp.path());
    CHECK(path.filename() == std::to_string(rec.mutant_id) + ".bin");
    CHECK(std::filesystem::file_size(path) == binary.image.size());
    CHECK(verify_diff(binary.path, path, rec));

    auto bytes = read_file_bytes(path);
    for (size_t i = 0; i < bytes.size(); ++i) {
      bool inside = i >= rec.file_offset && i < rec.file_offset + rec.patch.size();
      if (inside) {
        CHECK(bytes[i] == rec.patch[i - rec.file_offset]);
      } else if (bytes[i] != binary.image[i]) {
        FAIL("stray diff outside the patch window at offset ", i);
      }
    }
  }

  // Re-emitting is byte-identical.
  MutantRecord rec = to_record(mutants.front());
  auto bytes_before = read_file_bytes(emit_mutant(binary, rec, tmp.path()));
  auto bytes_after = read_file_bytes(emit_mutant(binary, rec, tmp.path()));
  CHECK(bytes_before == bytes_after);

  // Mutant files keep the execute bit so the harness can run them.
  auto mode = std::filesystem::status(tmp.path() /
                                      (std::to_string(rec.mutant_id) + ".bin"))
                  .permissions();
  CHECK((mode & std::filesystem::perms::owner_exec) !=
        std::filesystem::perms::none);
}

TEST_CASE("verify_diff rejects unchanged or out-of-window differences") {
  LoadedBinary binary = load_binary(corpus_binary("abs-O0"));
  auto mutants = enumerate_all(binary);
  MutantRecord rec = to_record(mutants.front());
  TempDir tmp;

  // The original differs from itself nowhere.
  CHECK(!verify_diff(binary.path, binary.path, rec));

  // A stray corrupted byte outside the window fails the check.
  auto path = emit_mutant(binary, rec, tmp.path());
  auto bytes = read_file_bytes(path);
  size_t stray = bytes.size() - 1;
  REQUIRE(stray >= rec.file_offset + rec.patch.size());
  bytes[stray] ^= 0xFF;
  auto corrupted = tmp.path() / "corrupted.bin";
  write_file_bytes(corrupted, bytes);
  CHECK(!verify_diff(binary.path, corrupted, rec));
}
