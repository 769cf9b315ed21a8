#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "netbed/hash.hpp"
#include "netbed/net.hpp"
#include "netbed/rng.hpp"

using namespace netbed;

TEST_CASE("sha256 matches FIPS 180-4 vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    std::string million_a(1000000, 'a');
    CHECK(sha256_hex(million_a) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 streaming equals one-shot") {
    Sha256 h;
    h.update("abc");
    h.update("dbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq");
    CHECK(hex_string(h.finish()) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("fnv1a64 known values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("pcg32 matches the reference stream") {
    // First outputs of the canonical XSH-RR generator seeded (42, 54).
    Pcg32 rng(42, 54);
    CHECK(rng.next() == 0xa15c02b7u);
    CHECK(rng.next() == 0x7b47f409u);
    CHECK(rng.next() == 0xba1d3330u);
    CHECK(rng.next() == 0x83d2f293u);
    CHECK(rng.next() == 0xbfa4784bu);
}

TEST_CASE("pcg32 streams are independent and reproducible") {
    Pcg32 a1(7, 1), a2(7, 1), b(7, 2);
    bool diverged = false;
    for (int i = 0; i < 64; i++) {
        u32 v = a1.next();
        CHECK(v == a2.next());
        if (v != b.next()) diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("next_below stays within bound") {
    Pcg32 rng(1, 1);
    for (int i = 0; i < 1000; i++) CHECK(rng.next_below(17) < 17);
}

TEST_CASE("derive_rng gives distinct child streams") {
    auto a = derive_rng(42, 0);
    auto b = derive_rng(42, 1);
    auto a_again = derive_rng(42, 0);
    CHECK(a.next() == a_again.next());
    std::set<u32> firsts;
    for (u64 label = 0; label < 32; label++) firsts.insert(derive_rng(9, label).next());
    CHECK(firsts.size() == 32);
    (void)b;
}

TEST_CASE("ipv4 parse and format round-trip") {
    auto a = Ipv4Addr::parse("10.34.0.2");
    REQUIRE(a.has_value());
    CHECK(a->str() == "10.34.0.2");
    CHECK(a->value == 0x0a220002u);
    CHECK_FALSE(Ipv4Addr::parse("10.34.0").has_value());
    CHECK_FALSE(Ipv4Addr::parse("10.34.0.256").has_value());
    CHECK_FALSE(Ipv4Addr::parse("10.34.0.2.5").has_value());
    CHECK_FALSE(Ipv4Addr::parse("ten.dots").has_value());
    CHECK_FALSE(Ipv4Addr::parse("").has_value());
}

TEST_CASE("cidr parse, containment, overlap") {
    auto c = Cidr::parse("10.34.0.0/24");
    REQUIRE(c.has_value());
    CHECK(c->str() == "10.34.0.0/24");
    CHECK(c->contains(*Ipv4Addr::parse("10.34.0.200")));
    CHECK_FALSE(c->contains(*Ipv4Addr::parse("10.35.0.1")));

    auto host_bits = Cidr::parse("10.34.0.9/24");
    REQUIRE(host_bits.has_value());
    CHECK(host_bits->network.str() == "10.34.0.0");

    auto wide = Cidr::parse("10.32.0.0/14");
    REQUIRE(wide.has_value());
    CHECK(wide->overlaps(*c));
    CHECK(c->overlaps(*wide));
    auto other = Cidr::parse("192.168.100.0/24");
    CHECK_FALSE(c->overlaps(*other));

    CHECK_FALSE(Cidr::parse("10.34.0.0").has_value());
    CHECK_FALSE(Cidr::parse("10.34.0.0/33").has_value());
    CHECK_FALSE(Cidr::parse("10.34.0.0/x").has_value());
}

TEST_CASE("mac formatting") {
    Mac m{{0x02, 0xab, 0x00, 0x12, 0x34, 0x56}};
    CHECK(m.str() == "02:ab:00:12:34:56");
}
