#include "colkit/distrib.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <charconv>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace colkit {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string now_utc() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

bool send_all(int fd, const void* data, size_t n) {
    const char* p = static_cast<const char*>(data);
    while (n) {
        ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
        if (w <= 0) return false;
        p += w;
        n -= size_t(w);
    }
    return true;
}

}  // namespace

uint32_t parse_ipv4(const std::string& s) {
    uint32_t out = 0;
    size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        if (i && (pos >= s.size() || s[pos++] != '.'))
            throw std::invalid_argument("bad IPv4 address: " + s);
        unsigned v = 0;
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
        if (ec != std::errc() || p == s.data() + pos || v > 255)
            throw std::invalid_argument("bad IPv4 address: " + s);
        pos = size_t(p - s.data());
        out = out << 8 | v;
    }
    if (pos != s.size()) throw std::invalid_argument("bad IPv4 address: " + s);
    return out;
}

std::pair<uint32_t, int> parse_cidr(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return {parse_ipv4(s), 32};
    int bits = -1;
    auto [p, ec] = std::from_chars(s.data() + slash + 1, s.data() + s.size(), bits);
    if (ec != std::errc() || p != s.data() + s.size() || bits < 0 || bits > 32)
        throw std::invalid_argument("bad CIDR block: " + s);
    return {parse_ipv4(s.substr(0, slash)), bits};
}

RouteTable RouteTable::parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    RouteTable t;
    bool have_md5 = false;
    std::string line;
    int ln = 0;
    while (std::getline(f, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(ln) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error("config line " + std::to_string(ln) + ": empty key or value");
        if (key == "md5") {
            t.published_md5 = Digest::from_hex(val);
            have_md5 = true;
        } else if (key == "default") {
            t.default_variant = val;
        } else {
            RouteRule r;
            r.pattern = key;
            std::tie(r.addr, r.prefix_len) = parse_cidr(key);
            r.variant = val;
            t.entries.push_back(std::move(r));
        }
    }
    if (!have_md5) throw std::runtime_error("config: missing md5 line");
    if (t.default_variant.empty()) throw std::runtime_error("config: missing default line");
    return t;
}

void RouteTable::validate() const {
    auto check = [&](const std::string& p) {
        Digest d = md5_file(p);
        if (!(d == published_md5))
            throw std::runtime_error("variant " + p + " digest " + d.hex() +
                                     " != published " + published_md5.hex());
    };
    check(default_variant);
    for (const auto& r : entries) check(r.variant);
}

const RouteRule* route_lookup(uint32_t ip, const RouteTable& table) {
    for (const auto& r : table.entries) {
        uint32_t mask = r.prefix_len == 0 ? 0 : ~uint32_t(0) << (32 - r.prefix_len);
        if ((ip & mask) == (r.addr & mask)) return &r;
    }
    return nullptr;
}

std::string route_variant(const std::string& ip, const RouteTable& table) {
    const RouteRule* r = route_lookup(parse_ipv4(ip), table);
    return r ? r->variant : table.default_variant;
}

void ServeLog::append(LogEntry e) {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(std::move(e));
}

std::vector<LogEntry> ServeLog::entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
}

std::string ServeLog::to_text() const {
    std::ostringstream o;
    for (const auto& e : entries())
        o << e.time << '\t' << e.ip << '\t' << e.rule << '\t' << e.variant << '\t' << e.bytes
          << '\n';
    return o.str();
}

Server::Server(RouteTable table, const std::string& bind_addr, uint16_t port)
    : table_(std::move(table)) {
    table_.validate();
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket: " + std::string(strerror(errno)));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    sa.sin_addr.s_addr = htonl(parse_ipv4(bind_addr));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) < 0 ||
        ::listen(listen_fd_, 16) < 0) {
        std::string err = strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("bind " + bind_addr + ":" + std::to_string(port) + ": " + err);
    }
    socklen_t len = sizeof sa;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &len);
    port_ = ntohs(sa.sin_port);
}

Server::~Server() { stop(); }

void Server::start() {
    if (running_) return;
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::lock_guard<std::mutex> lock(handlers_mu_);
    for (auto& t : handlers_)
        if (t.joinable()) t.join();
    handlers_.clear();
    running_ = false;
}

void Server::accept_loop() {
    for (;;) {
        sockaddr_in peer{};
        socklen_t len = sizeof peer;
        int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&peer), &len);
        if (fd < 0) return;   // listener closed by stop()
        char ip[INET_ADDRSTRLEN] = "?";
        ::inet_ntop(AF_INET, &peer.sin_addr, ip, sizeof ip);
        std::lock_guard<std::mutex> lock(handlers_mu_);
        handlers_.emplace_back([this, fd, addr = std::string(ip)] { handle(fd, addr); });
    }
}

void Server::handle(int fd, const std::string& peer) {
    std::string req;
    char buf[2048];
    while (req.find("\r\n\r\n") == std::string::npos && req.size() < 8192) {
        ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) break;
        req.append(buf, size_t(n));
    }
    std::istringstream first(req.substr(0, req.find("\r\n")));
    std::string method, path, proto;
    first >> method >> path >> proto;

    if (method != "GET" || path != "/artifact") {
        std::string resp =
            "HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";
        send_all(fd, resp.data(), resp.size());
        ::close(fd);
        log_.append({now_utc(), peer, "-", path.empty() ? "-" : path, 0});
        return;
    }

    const RouteRule* rule = route_lookup(parse_ipv4(peer), table_);
    std::string variant = rule ? rule->variant : table_.default_variant;
    std::string rule_name = rule ? rule->pattern : "default";

    std::ifstream file(variant, std::ios::binary);
    file.seekg(0, std::ios::end);
    auto size = file.tellg();
    file.seekg(0);
    if (!file || size < 0) {
        std::string resp =
            "HTTP/1.1 500 Internal Server Error\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";
        send_all(fd, resp.data(), resp.size());
        ::close(fd);
        log_.append({now_utc(), peer, rule_name, variant, 0});
        return;
    }

    std::string head = "HTTP/1.1 200 OK\r\nContent-Type: application/octet-stream\r\n"
                       "Content-Length: " + std::to_string(size) + "\r\nConnection: close\r\n\r\n";
    uint64_t sent = 0;
    bool ok = send_all(fd, head.data(), head.size());
    std::vector<char> chunk(64 * 1024);
    while (ok && file) {
        file.read(chunk.data(), std::streamsize(chunk.size()));
        std::streamsize n = file.gcount();
        if (file.bad()) {   // mid-stream read failure: abort the connection
            ok = false;
            break;
        }
        if (n == 0) break;
        ok = send_all(fd, chunk.data(), size_t(n));
        if (ok) sent += uint64_t(n);
    }
    ::close(fd);
    log_.append({now_utc(), peer, rule_name, variant, sent});
}

ClientReport client_fetch_verify(const std::string& url, const Digest& expected,
                                 const FetchOptions& opts) {
    ClientReport rep;
    rep.expected = expected;
    auto fail = [&rep](const std::string& why) {
        rep.pass = false;
        rep.diagnostic = why;
        return rep;
    };

    if (url.rfind("http://", 0) != 0) return fail("unsupported url scheme");
    std::string rest = url.substr(7);
    auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = hostport.find(':');
    std::string host = hostport.substr(0, colon);
    uint16_t port = 80;
    if (colon != std::string::npos) port = uint16_t(std::stoi(hostport.substr(colon + 1)));

    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return fail("socket failed");
    if (!opts.source_addr.empty()) {
        sockaddr_in src{};
        src.sin_family = AF_INET;
        src.sin_addr.s_addr = htonl(parse_ipv4(opts.source_addr));
        if (::bind(fd, reinterpret_cast<sockaddr*>(&src), sizeof src) < 0) {
            ::close(fd);
            return fail("cannot bind source address " + opts.source_addr);
        }
    }
    sockaddr_in dst{};
    dst.sin_family = AF_INET;
    dst.sin_port = htons(port);
    dst.sin_addr.s_addr = htonl(parse_ipv4(host));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&dst), sizeof dst) < 0) {
        ::close(fd);
        return fail("connect failed: " + std::string(strerror(errno)));
    }
    std::string req = "GET " + path + " HTTP/1.1\r\nHost: " + hostport +
                      "\r\nConnection: close\r\n\r\n";
    if (!send_all(fd, req.data(), req.size())) {
        ::close(fd);
        return fail("send failed");
    }

    std::string head;
    char buf[64 * 1024];
    size_t body_start = std::string::npos;
    while (body_start == std::string::npos) {
        ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) {
            ::close(fd);
            return fail("connection closed before headers finished");
        }
        head.append(buf, size_t(n));
        body_start = head.find("\r\n\r\n");
    }
    std::istringstream status(head.substr(0, head.find("\r\n")));
    std::string proto, code;
    status >> proto >> code;
    if (code != "200") {
        ::close(fd);
        return fail("http status " + code);
    }
    uint64_t content_length = 0;
    bool have_length = false;
    {
        std::istringstream hs(head.substr(0, body_start));
        std::string line;
        std::getline(hs, line);
        while (std::getline(hs, line)) {
            auto colon2 = line.find(':');
            if (colon2 == std::string::npos) continue;
            std::string k = trim(line.substr(0, colon2));
            for (auto& c : k) c = char(std::tolower(uint8_t(c)));
            if (k == "content-length") {
                content_length = std::stoull(trim(line.substr(colon2 + 1)));
                have_length = true;
            }
        }
    }

    Md5Stream digest;
    uint64_t got = 0;
    std::ofstream save;
    if (!opts.save_path.empty()) {
        save.open(opts.save_path, std::ios::binary | std::ios::trunc);
        if (!save) {
            ::close(fd);
            return fail("cannot create " + opts.save_path);
        }
    }
    auto feed = [&](const char* p, size_t n) {
        std::vector<uint8_t> tmp(p, p + n);
        if (opts.corrupt_offset && *opts.corrupt_offset >= got &&
            *opts.corrupt_offset < got + n)
            tmp[size_t(*opts.corrupt_offset - got)] ^= 0x01;
        digest.update(std::span<const uint8_t>(tmp.data(), tmp.size()));
        if (save.is_open()) save.write(reinterpret_cast<const char*>(tmp.data()),
                                       std::streamsize(tmp.size()));
        got += n;
    };
    feed(head.data() + body_start + 4, head.size() - body_start - 4);
    for (;;) {
        ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n < 0) {
            ::close(fd);
            return fail("recv failed");
        }
        if (n == 0) break;
        feed(buf, size_t(n));
    }
    ::close(fd);

    rep.bytes_received = got;
    rep.computed = digest.final();
    if (have_length && got != content_length)
        return fail("short read: " + std::to_string(got) + " of " +
                    std::to_string(content_length));
    rep.pass = rep.computed == expected;
    if (!rep.pass && rep.diagnostic.empty()) rep.diagnostic = "digest mismatch";
    return rep;
}

}  // namespace colkit
