#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <thread>

#include "colkit/collision_vectors.hpp"
#include "colkit/distrib.hpp"
#include "colkit/md5.hpp"

using namespace colkit;

namespace {

void write_tmp(const std::string& path, std::span<const uint8_t> data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    REQUIRE(bool(f));
    f.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    REQUIRE(bool(f));
    f << text;
}

std::vector<uint8_t> slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(bool(f));
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
}

// The published collision pair gives two distinct 128-byte variants with
// identical MD5 — exactly what the server's startup check demands.
struct VariantPair {
    std::string clean = "dist_clean.bin", poisoned = "dist_poisoned.bin";
    Digest digest;
    VariantPair() {
        auto a = from_hex(kCollisionPairAHex), b = from_hex(kCollisionPairBHex);
        write_tmp(clean, a);
        write_tmp(poisoned, b);
        digest = md5(a);
    }
    ~VariantPair() {
        remove(clean.c_str());
        remove(poisoned.c_str());
    }
};

}  // namespace

TEST_CASE("parse_ipv4 accepts dotted quads only") {
    CHECK(parse_ipv4("127.0.0.1") == 0x7f000001u);
    CHECK(parse_ipv4("0.0.0.0") == 0u);
    CHECK(parse_ipv4("255.255.255.255") == 0xffffffffu);
    CHECK(parse_ipv4("10.1.2.3") == 0x0a010203u);
    for (const char* bad : {"256.1.1.1", "1.2.3", "1.2.3.4.5", "a.b.c.d", "1.2.3.4x",
                            "1..2.3", "-1.2.3.4", ""})
        CHECK_THROWS_AS(parse_ipv4(bad), std::invalid_argument);
}

TEST_CASE("parse_cidr defaults to /32") {
    CHECK(parse_cidr("10.0.0.0/8") == std::pair<uint32_t, int>{0x0a000000u, 8});
    CHECK(parse_cidr("1.2.3.4") == std::pair<uint32_t, int>{0x01020304u, 32});
    CHECK(parse_cidr("0.0.0.0/0") == std::pair<uint32_t, int>{0u, 0});
    for (const char* bad : {"10.0.0.0/33", "10.0.0.0/-1", "10.0.0.0/", "10.0.0.0/8/8"})
        CHECK_THROWS_AS(parse_cidr(bad), std::invalid_argument);
}

TEST_CASE("route_lookup is first match with prefix masking") {
    RouteTable t;
    t.default_variant = "a";
    RouteRule one{"127.0.0.2/32", 0x7f000002u, 32, "b"};
    RouteRule two{"127.0.0.0/8", 0x7f000000u, 8, "c"};
    t.entries = {one, two};

    CHECK(route_lookup(0x7f000002u, t)->variant == "b");
    CHECK(route_lookup(0x7f00004du, t)->variant == "c");
    CHECK(route_lookup(0x08080808u, t) == nullptr);
    CHECK(route_variant("127.0.0.2", t) == "b");
    CHECK(route_variant("127.9.9.9", t) == "c");
    CHECK(route_variant("8.8.8.8", t) == "a");

    std::swap(t.entries[0], t.entries[1]);   // broader rule first now wins
    CHECK(route_variant("127.0.0.2", t) == "c");

    RouteTable all;
    all.default_variant = "a";
    all.entries = {RouteRule{"0.0.0.0/0", 0, 0, "x"}};
    CHECK(route_variant("9.9.9.9", all) == "x");
}

TEST_CASE("config parsing accepts comments and rejects malformed lines") {
    VariantPair v;
    write_text("dist_good.conf",
               "# routing demo\n"
               "md5 = " + v.digest.hex() + "\n"
               "default = " + v.clean + "   # normal clients\n"
               "\n"
               "127.0.0.2/32 = " + v.poisoned + "\n");
    RouteTable t = RouteTable::parse_config("dist_good.conf");
    CHECK(t.default_variant == v.clean);
    CHECK(t.published_md5 == v.digest);
    REQUIRE(t.entries.size() == 1);
    CHECK(t.entries[0].pattern == "127.0.0.2/32");
    CHECK(t.entries[0].prefix_len == 32);
    CHECK(t.entries[0].variant == v.poisoned);
    remove("dist_good.conf");

    auto expect_bad = [](const std::string& body) {
        write_text("dist_bad.conf", body);
        CHECK_THROWS_AS(RouteTable::parse_config("dist_bad.conf"), std::runtime_error);
        remove("dist_bad.conf");
    };
    expect_bad("no equals sign here\n");
    expect_bad("default = x\n");                                // missing md5
    expect_bad("md5 = 00112233445566778899aabbccddeeff\n");     // missing default
    expect_bad("md5 = 00112233445566778899aabbccddeeff\ndefault = \n");
    write_text("dist_bad.conf", "md5 = nothex\ndefault = x\n");
    CHECK_THROWS_AS(RouteTable::parse_config("dist_bad.conf"), std::invalid_argument);
    remove("dist_bad.conf");
    CHECK_THROWS_AS(RouteTable::parse_config("no_such.conf"), std::runtime_error);

    write_text("dist_badip.conf", "md5 = 00112233445566778899aabbccddeeff\n"
                                  "default = x\n"
                                  "999.0.0.1 = y\n");
    CHECK_THROWS_AS(RouteTable::parse_config("dist_badip.conf"), std::invalid_argument);
    remove("dist_badip.conf");
}

TEST_CASE("server refuses to start when a variant fails the digest check") {
    VariantPair v;
    std::vector<uint8_t> junk = {1, 2, 3};
    write_tmp("dist_junk.bin", junk);

    RouteTable t;
    t.published_md5 = v.digest;
    t.default_variant = v.clean;
    t.entries = {RouteRule{"127.0.0.2/32", 0x7f000002u, 32, "dist_junk.bin"}};
    CHECK_THROWS_AS(Server(t, "127.0.0.1", 0), std::runtime_error);

    t.entries[0].variant = "dist_missing.bin";
    CHECK_THROWS_AS(Server(t, "127.0.0.1", 0), std::runtime_error);
    remove("dist_junk.bin");
}

TEST_CASE("end-to-end routing with verified downloads") {
    VariantPair v;
    RouteTable t;
    t.published_md5 = v.digest;
    t.default_variant = v.clean;
    t.entries = {RouteRule{"127.0.0.2/32", 0x7f000002u, 32, v.poisoned}};

    Server server(t, "127.0.0.1", 0);
    server.start();
    REQUIRE(server.port() != 0);
    std::string url = "http://127.0.0.1:" + std::to_string(server.port()) + "/artifact";

    FetchOptions normal;
    normal.source_addr = "127.0.0.1";
    normal.save_path = "dist_got_normal.bin";
    ClientReport rn = client_fetch_verify(url, v.digest, normal);
    CHECK(rn.pass);
    CHECK(rn.bytes_received == 128);
    CHECK(rn.computed == v.digest);

    FetchOptions target;
    target.source_addr = "127.0.0.2";
    target.save_path = "dist_got_target.bin";
    ClientReport rt = client_fetch_verify(url, v.digest, target);
    CHECK(rt.pass);
    CHECK(rt.bytes_received == 128);

    auto got_n = slurp("dist_got_normal.bin");
    auto got_t = slurp("dist_got_target.bin");
    CHECK(got_n == slurp(v.clean));
    CHECK(got_t == slurp(v.poisoned));
    CHECK(got_n != got_t);             // different bytes...
    CHECK(md5(got_n) == md5(got_t));   // ...same digest

    // 404 on any other path; digest failure on corruption
    ClientReport missing = client_fetch_verify(
        "http://127.0.0.1:" + std::to_string(server.port()) + "/nope", v.digest, {});
    CHECK_FALSE(missing.pass);
    CHECK(missing.diagnostic.find("404") != std::string::npos);

    FetchOptions corrupt;
    corrupt.source_addr = "127.0.0.1";
    corrupt.corrupt_offset = 5;
    ClientReport rc = client_fetch_verify(url, v.digest, corrupt);
    CHECK_FALSE(rc.pass);
    CHECK(rc.bytes_received == 128);
    CHECK(rc.diagnostic == "digest mismatch");

    server.stop();

    // the log saw each request with the matched rule
    auto log = server.log().entries();
    REQUIRE(log.size() >= 4);
    CHECK(log[0].ip == "127.0.0.1");
    CHECK(log[0].rule == "default");
    CHECK(log[0].variant == v.clean);
    CHECK(log[0].bytes == 128);
    CHECK(log[1].ip == "127.0.0.2");
    CHECK(log[1].rule == "127.0.0.2/32");
    CHECK(log[1].variant == v.poisoned);

    std::string text = server.log().to_text();
    CHECK(std::count(text.begin(), text.end(), '\n') >= 4);
    CHECK(text.find('\t') != std::string::npos);

    remove("dist_got_normal.bin");
    remove("dist_got_target.bin");
}

TEST_CASE("client flags a short body against content-length") {
    // Minimal bad server: claims 100 bytes, sends 10, closes.
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = 0;
    sa.sin_addr.s_addr = htonl(0x7f000001u);
    REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) == 0);
    REQUIRE(::listen(fd, 1) == 0);
    socklen_t len = sizeof sa;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len);
    uint16_t port = ntohs(sa.sin_port);

    std::thread bad([fd] {
        int c = ::accept(fd, nullptr, nullptr);
        if (c < 0) return;
        char buf[512];
        (void)!::recv(c, buf, sizeof buf, 0);
        const char* resp =
            "HTTP/1.1 200 OK\r\nContent-Length: 100\r\n\r\n0123456789";
        (void)!::send(c, resp, strlen(resp), 0);
        ::close(c);
    });

    ClientReport r = client_fetch_verify(
        "http://127.0.0.1:" + std::to_string(port) + "/x", md5(std::string("")), {});
    CHECK_FALSE(r.pass);
    CHECK(r.diagnostic.find("short read") != std::string::npos);
    CHECK(r.bytes_received == 10);

    bad.join();
    ::close(fd);
}

TEST_CASE("client rejects unsupported urls") {
    ClientReport r = client_fetch_verify("ftp://host/x", md5(std::string("")), {});
    CHECK_FALSE(r.pass);
    CHECK(r.diagnostic.find("scheme") != std::string::npos);
}
