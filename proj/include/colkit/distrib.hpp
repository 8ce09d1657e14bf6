#pragma once
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "colkit/md5.hpp"

// IP-conditional file distribution: a minimal HTTP/1.1 file server that
// picks the served variant by requester address, plus a digest-verifying
// streaming client.

namespace colkit {

struct RouteRule {
    std::string pattern;    // "a.b.c.d" or "a.b.c.d/n" as written in the config
    uint32_t addr = 0;      // host byte order
    int prefix_len = 32;
    std::string variant;    // file path served on match
};

struct RouteTable {
    std::string default_variant;
    std::vector<RouteRule> entries;   // first match wins
    Digest published_md5;

    // Line-oriented config: `md5 = <hex>`, `default = <path>`,
    // `<ip-or-cidr> = <path>`; '#' starts a comment.  Syntax only.
    static RouteTable parse_config(const std::string& path);

    // Startup check: every variant readable and hashing to published_md5.
    void validate() const;
};

uint32_t parse_ipv4(const std::string& s);                  // throws std::invalid_argument
std::pair<uint32_t, int> parse_cidr(const std::string& s);  // plain address -> /32

// First matching rule, or null for "use the default variant".
const RouteRule* route_lookup(uint32_t ip, const RouteTable& table);

// Convenience: variant path for a textual address.
std::string route_variant(const std::string& ip, const RouteTable& table);

struct LogEntry {
    std::string time, ip, rule, variant;
    uint64_t bytes = 0;
};

class ServeLog {
  public:
    void append(LogEntry e);
    std::vector<LogEntry> entries() const;
    std::string to_text() const;   // tab-separated: time ip rule variant bytes

  private:
    mutable std::mutex mu_;
    std::vector<LogEntry> log_;
};

// GET /artifact returns the routed variant; anything else is 404.  One
// handler thread per connection; the table is immutable once serving.
class Server {
  public:
    // Validates the table, binds and listens; port 0 picks an ephemeral
    // port.  Throws std::runtime_error on bind failure.
    Server(RouteTable table, const std::string& bind_addr, uint16_t port);
    ~Server();

    void start();
    void stop();
    uint16_t port() const { return port_; }
    const RouteTable& table() const { return table_; }
    const ServeLog& log() const { return log_; }

  private:
    void accept_loop();
    void handle(int fd, const std::string& peer);

    RouteTable table_;
    ServeLog log_;
    int listen_fd_ = -1;
    uint16_t port_ = 0;
    bool running_ = false;
    std::thread acceptor_;
    std::mutex handlers_mu_;
    std::vector<std::thread> handlers_;
};

struct ClientReport {
    uint64_t bytes_received = 0;
    Digest computed;
    Digest expected;
    bool pass = false;
    std::string diagnostic;   // empty on a clean pass
};

struct FetchOptions {
    std::string source_addr;                   // optional local bind (127.x aliases)
    std::string save_path;                     // also write the body here if non-empty
    std::optional<uint64_t> corrupt_offset;    // test hook: flip one body byte
};

// Streams http://host:port/path through an incremental digest and compares
// with `expected`.  Network errors and short reads fail with a diagnostic.
ClientReport client_fetch_verify(const std::string& url, const Digest& expected,
                                 const FetchOptions& opts = {});

}  // namespace colkit
