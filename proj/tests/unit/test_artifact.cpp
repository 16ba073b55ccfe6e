#include "btsim/artifact.hpp"

#include "btsim/sha256.hpp"
#include "btsim/sampling.hpp"

#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <functional>
#include <filesystem>
#include <fstream>

using namespace btsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("btsim-test-" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void put_file(const fs::path& p, const std::string& bytes) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

ResultArtifact make_artifact() {
    ResultArtifact a;
    a.mode = "coherence-x";
    a.k = 1;
    a.mu = 1.0;
    a.shots = 10;
    a.seed = 42;
    a.counts.bit_order = {0, 1, 2, 3};
    a.counts.table = {{"0000", 6}, {"1111", 4}};
    a.counts.total_shots = 10;
    a.metrics["w_x"] = {1.0, 0.0, 10};
    a.provenance.timestamp_utc = "2026-01-01T00:00:00Z";
    a.provenance.circuit_hash = std::string(64, 'a');
    return a;
}

} // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    // Multi-block message.
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("canonical json") {
    SUBCASE("keys are sorted and floats carry 17 significant digits") {
        json doc;
        doc["b"] = 0.1;
        doc["a"] = 1.0;
        doc["c"] = json::array({1, 2, 3});
        const std::string text = canonical_json(doc);
        CHECK(text == "{\n  \"a\": 1,\n  \"b\": 0.10000000000000001,\n  \"c\": [1, 2, 3]\n}\n");
    }
    SUBCASE("serialize-parse-serialize is byte stable") {
        json doc;
        doc["x"] = 1.4142135623730951;
        doc["nested"] = {{"k", 3}, {"values", json::array({0.5, 0.25})}};
        doc["s"] = "text with \"quotes\"";
        const std::string once = canonical_json(doc);
        const std::string twice = canonical_json(json::parse(once));
        CHECK(once == twice);
    }
    SUBCASE("non-finite numbers are rejected") {
        json doc;
        doc["bad"] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(canonical_json(doc), validation_error);
    }
    SUBCASE("random documents are serialize-parse stable") {
        SeededSampler rng(77);
        std::function<json(int)> gen = [&](int depth) -> json {
            const auto pick = rng.next_u64() % (depth > 2 ? 4 : 6);
            switch (pick) {
            case 0: return json(static_cast<std::int64_t>(rng.next_u64()));
            case 1: return json(rng.next_double() * 2e3 - 1e3);
            case 2: return json(rng.next_u64() % 2 == 0);
            case 3: {
                std::string s;
                for (int i = 0; i < 8; ++i)
                    s.push_back(static_cast<char>(' ' + rng.next_u64() % 95));
                return json(s);
            }
            case 4: {
                json arr = json::array();
                for (int i = 0; i < 3; ++i) arr.push_back(gen(depth + 1));
                return arr;
            }
            default: {
                json obj = json::object();
                for (int i = 0; i < 3; ++i)
                    obj["key" + std::to_string(rng.next_u64() % 10)] = gen(depth + 1);
                return obj;
            }
            }
        };
        for (int rep = 0; rep < 50; ++rep) {
            const std::string once = canonical_json(gen(0));
            CHECK(canonical_json(json::parse(once)) == once);
        }
    }
}

TEST_CASE("float formatting is lossless for doubles") {
    SeededSampler rng(88);
    int checked = 0;
    while (checked < 500) {
        double v;
        const std::uint64_t bits = rng.next_u64();
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) continue;
        ++checked;
        const double back = std::stod(format_float17(v));
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("result artifacts") {
    TempDir dir;
    const std::string path = (dir.path / "artifact.json").string();

    SUBCASE("write-read round trip preserves all fields") {
        const ResultArtifact a = make_artifact();
        write_result_artifact(a, path);
        const ResultArtifact b = read_result_artifact(path);
        CHECK(b.mode == a.mode);
        CHECK(b.k == a.k);
        CHECK(b.mu == a.mu);
        CHECK(b.shots == a.shots);
        CHECK(b.seed == a.seed);
        CHECK(b.counts.table == a.counts.table);
        CHECK(b.metrics.at("w_x").value == 1.0);
        CHECK(b.provenance.circuit_hash == a.provenance.circuit_hash);
    }
    SUBCASE("writing twice is byte identical") {
        write_result_artifact(make_artifact(), path);
        const std::string first = slurp(path);
        write_result_artifact(make_artifact(), path);
        CHECK(first == slurp(path));
        CHECK(!first.empty());
    }
    SUBCASE("counts total mismatch fails validation before write") {
        ResultArtifact a = make_artifact();
        a.shots = 11;
        CHECK_THROWS_AS(write_result_artifact(a, path), validation_error);
    }
    SUBCASE("schema violations are parse errors naming the field") {
        write_result_artifact(make_artifact(), path);
        json doc = read_json_file(path);
        json broken = doc;
        broken["metrics"]["w_x"].erase("error");
        write_canonical_json(broken, path);
        CHECK_THROWS_WITH_AS(static_cast<void>(read_result_artifact(path)),
                             doctest::Contains("error"), parse_error);

        broken = doc;
        broken["surprise"] = 1;
        write_canonical_json(broken, path);
        CHECK_THROWS_WITH_AS(static_cast<void>(read_result_artifact(path)),
                             doctest::Contains("surprise"), parse_error);

        broken = doc;
        broken["counts"]["total_shots"] = 11;
        write_canonical_json(broken, path);
        CHECK_THROWS_AS(static_cast<void>(read_result_artifact(path)), parse_error);
    }
}

TEST_CASE("metrics summary round trip") {
    TempDir dir;
    const std::string path = (dir.path / "summary.json").string();
    MetricsSummary s;
    s.metrics["w_x"] = {0.8398, 0.0038, 20000};
    s.metrics["v"] = {0.8771, 0.0034, 20000};
    s.inputs = {"cx.json", "rp.json"};
    s.provenance.timestamp_utc = "2026-01-01T00:00:00Z";
    s.provenance.circuit_hash = std::string(64, 'b');
    write_metrics_summary(s, path);
    const MetricsSummary t = read_metrics_summary(path);
    CHECK(t.metrics.at("w_x").value == 0.8398);
    CHECK(t.metrics.at("v").error == 0.0034);
    CHECK(t.inputs == s.inputs);
}

TEST_CASE("sweep document round trip") {
    SweepResult sweep = deviation_curves(1, 1.0, ChannelFamily::PHASE_FLIP,
                                         {InsertLocation::PRE_MEASUREMENT, 2}, {0.0, 0.25, 0.5});
    Provenance prov;
    prov.timestamp_utc = "2026-01-01T00:00:00Z";
    prov.circuit_hash = std::string(64, 'c');
    const json doc = sweep_to_json(sweep, prov);
    const SweepResult back = sweep_from_json(doc);
    CHECK(back.channel_family_id == "phase-flip");
    CHECK(back.insertion.location == InsertLocation::PRE_MEASUREMENT);
    CHECK(back.insertion.target_qubit == 2);
    REQUIRE(back.points.size() == 3);
    CHECK(back.points[1].lambda == 0.25);
    CHECK(back.points[1].predicted.w_x == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(back.baseline.w_x == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("circuit hashes are stable and parameter sensitive") {
    const auto [c1, l1] = build_branch_transfer(1, 1.0);
    const auto [c2, l2] = build_branch_transfer(1, 1.0);
    const auto [c3, l3] = build_branch_transfer(1, 0.5);
    CHECK(circuit_hash(c1) == circuit_hash(c2));
    CHECK(circuit_hash(c1) != circuit_hash(c3));
    CHECK(circuit_hash(c1).size() == 64);

    NoiseSpec a;
    a.p1 = 0.001;
    NoiseSpec b;
    b.p1 = 0.002;
    CHECK(noise_spec_hash(a) != noise_spec_hash(b));
}

TEST_CASE("manifest build and verify") {
    TempDir dir;
    SUBCASE("empty directory gives an empty manifest") {
        const Manifest m = build_manifest(dir.path.string());
        CHECK(m.entries.empty());
    }
    SUBCASE("known digest, nested paths, verify lifecycle") {
        put_file(dir.path / "a.txt", "abc");
        put_file(dir.path / "sub" / "b.txt", "payload");
        const Manifest m = build_manifest(dir.path.string());
        REQUIRE(m.entries.size() == 2);
        CHECK(m.entries.at("a.txt") ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(m.entries.count("sub/b.txt") == 1);

        const std::string manifest_path = (dir.path / "MANIFEST.json").string();
        write_manifest(m, manifest_path);
        const Manifest loaded = read_manifest(manifest_path);
        CHECK(loaded.entries == m.entries);

        VerifyReport ok = verify_manifest(dir.path.string(), loaded, {"MANIFEST.json"});
        CHECK(ok.ok);

        put_file(dir.path / "a.txt", "abd");
        VerifyReport changed = verify_manifest(dir.path.string(), loaded, {"MANIFEST.json"});
        CHECK_FALSE(changed.ok);
        REQUIRE(changed.mismatches.size() == 1);
        CHECK(changed.mismatches[0] == "a.txt");

        fs::remove(dir.path / "sub" / "b.txt");
        VerifyReport missing = verify_manifest(dir.path.string(), loaded, {"MANIFEST.json"});
        CHECK_FALSE(missing.ok);
        REQUIRE(missing.missing.size() == 1);
        CHECK(missing.missing[0] == "sub/b.txt");

        put_file(dir.path / "c.txt", "new");
        VerifyReport extra = verify_manifest(dir.path.string(), loaded, {"MANIFEST.json"});
        CHECK(std::find(extra.extra.begin(), extra.extra.end(), "c.txt") != extra.extra.end());
    }
}

TEST_CASE("timestamps honor SOURCE_DATE_EPOCH") {
    setenv("SOURCE_DATE_EPOCH", "1000000000", 1);
    CHECK(utc_timestamp() == "2001-09-09T01:46:40Z");
    unsetenv("SOURCE_DATE_EPOCH");
}
