#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "kem/cipher_core.hpp"
#include "kem/digest_schedule.hpp"
#include "kem/hex.hpp"
#include "kem/memristor_image.hpp"
#include "kem/wire_protocol.hpp"

namespace {

const std::string kCli = KEMCLI_PATH;

std::string scratch_dir() {
    static std::string dir = [] {
        char tmpl[] = "/tmp/kemcli-test-XXXXXX";
        const char* path = mkdtemp(tmpl);
        REQUIRE(path != nullptr);
        return std::string(path);
    }();
    return dir;
}

std::string path_in_scratch(const std::string& name) {
    return scratch_dir() + "/" + name;
}

int run(const std::string& args, std::string* stdout_text = nullptr) {
    const std::string out_path = path_in_scratch("stdout.txt");
    const std::string cmd = kCli + " " + args + " >" + out_path + " 2>" + path_in_scratch("stderr.txt");
    const int status = std::system(cmd.c_str());
    if (stdout_text != nullptr) {
        std::ifstream in(out_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        *stdout_text = buf.str();
    }
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    REQUIRE(static_cast<bool>(out));
}

void spit(const std::string& path, const std::string& text) {
    spit(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// A port that was free a moment ago; good enough for a loopback test.
std::uint16_t free_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    socklen_t len = sizeof addr;
    REQUIRE(::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    const std::uint16_t port = ntohs(addr.sin_port);
    ::close(fd);
    return port;
}

std::string default_lut() {
    static std::string path = [] {
        const std::string p = path_in_scratch("default.lut");
        REQUIRE(run("lutgen --seed 42 --out " + p) == 0);
        return p;
    }();
    return path;
}

std::string cred_args() {
    return "--lut " + default_lut() + " --id cli-device --pw cli-password";
}

std::map<std::string, std::string> parse_kat(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in));
    std::map<std::string, std::string> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto sep = line.find(" = ");
        REQUIRE(sep != std::string::npos);
        records[line.substr(0, sep)] = line.substr(sep + 3);
    }
    return records;
}

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("encrypt --in x --out y") == 2); // missing --lut/--id/--pw
    CHECK(run("--help") == 0);
}

TEST_CASE("lutgen") {
    const std::string a = path_in_scratch("a.lut");
    const std::string b = path_in_scratch("b.lut");

    SUBCASE("deterministic for a fixed seed") {
        CHECK(run("lutgen --seed 7 --out " + a) == 0);
        CHECK(run("lutgen --seed 7 --out " + b) == 0);
        CHECK(slurp(a) == slurp(b));
    }
    SUBCASE("different seeds differ") {
        CHECK(run("lutgen --seed 0 --out " + a) == 0);
        CHECK(run("lutgen --seed 1 --out " + b) == 0);
        CHECK(slurp(a) != slurp(b));
    }
    SUBCASE("output shape") {
        CHECK(run("lutgen --seed 3 --out " + a) == 0);
        std::ifstream in(a);
        std::size_t rows = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') {
                continue;
            }
            CHECK(std::count(line.begin(), line.end(), ',') == 7);
            ++rows;
        }
        CHECK(rows == 128);
    }
}

TEST_CASE("encrypt and decrypt") {
    const std::string plain = path_in_scratch("msg.txt");
    const std::string frame = path_in_scratch("msg.frame");
    const std::string recovered = path_in_scratch("msg.out");
    spit(plain, std::string("Keyless"));

    SUBCASE("round trip") {
        std::string out;
        REQUIRE(run("encrypt " + cred_args() + " --in " + plain + " --out " + frame, &out) == 0);
        // 7-byte plaintext: 23-byte header + 15 doubles
        CHECK(slurp(frame).size() == 23 + 8 * 15);
        CHECK(out.substr(0, 5) == "rn = ");
        CHECK(out.size() >= 5 + 32);

        REQUIRE(run("decrypt " + cred_args() + " --in " + frame + " --out " + recovered) == 0);
        CHECK(slurp(recovered) == slurp(plain));
    }
    SUBCASE("provided nonce is honored and recorded") {
        const std::string rn_file = path_in_scratch("nonce.hex");
        const std::string rn = "00112233445566778899aabbccddeeff";
        std::string out;
        REQUIRE(run("encrypt " + cred_args() + " --rn " + rn + " --rn-file " + rn_file + " --in " +
                        plain + " --out " + frame,
                    &out) == 0);
        CHECK(out == "rn = " + rn + "\n");

        // saved mode reuses the recorded nonce
        const std::string frame2 = path_in_scratch("msg2.frame");
        REQUIRE(run("encrypt " + cred_args() + " --rn-saved --rn-file " + rn_file + " --in " +
                        plain + " --out " + frame2,
                    &out) == 0);
        CHECK(slurp(frame2) == slurp(frame));
    }
    SUBCASE("saved mode without a record fails") {
        CHECK(run("encrypt " + cred_args() + " --rn-saved --rn-file " +
                  path_in_scratch("absent.hex") + " --in " + plain + " --out " + frame) == 8);
    }
    SUBCASE("bad nonce hex fails") {
        CHECK(run("encrypt " + cred_args() + " --rn 123 --in " + plain + " --out " + frame) == 8);
    }
    SUBCASE("oversized plaintext fails with the MessageTooLong code") {
        const std::string big = path_in_scratch("big.txt");
        spit(big, std::string(120, 'x'));
        CHECK(run("encrypt " + cred_args() + " --in " + big + " --out " + frame) == 4);
        spit(big, std::string(119, 'x'));
        CHECK(run("encrypt " + cred_args() + " --in " + big + " --out " + frame) == 0);
    }
    SUBCASE("empty plaintext fails") {
        const std::string empty = path_in_scratch("empty.txt");
        spit(empty, std::string());
        CHECK(run("encrypt " + cred_args() + " --in " + empty + " --out " + frame) == 4);
    }
    SUBCASE("password from the environment") {
        REQUIRE(run("encrypt " + cred_args() + " --in " + plain + " --out " + frame) == 0);
        const std::string env_args = "--lut " + default_lut() + " --id cli-device --pw-env KEM_TEST_PW";
        setenv("KEM_TEST_PW", "cli-password", 1);
        REQUIRE(run("decrypt " + env_args + " --in " + frame + " --out " + recovered) == 0);
        CHECK(slurp(recovered) == slurp(plain));
        unsetenv("KEM_TEST_PW");
    }
    SUBCASE("wrong password fails with the CorruptCipher code") {
        REQUIRE(run("encrypt " + cred_args() + " --in " + plain + " --out " + frame) == 0);
        const std::string wrong = "--lut " + default_lut() + " --id cli-device --pw wrong-password";
        CHECK(run("decrypt " + wrong + " --in " + frame + " --out " + recovered) == 6);
    }
    SUBCASE("wrong table fails with the CorruptCipher code") {
        REQUIRE(run("encrypt " + cred_args() + " --in " + plain + " --out " + frame) == 0);
        const std::string other_lut = path_in_scratch("other.lut");
        REQUIRE(run("lutgen --seed 43 --out " + other_lut) == 0);
        const std::string wrong = "--lut " + other_lut + " --id cli-device --pw cli-password";
        CHECK(run("decrypt " + wrong + " --in " + frame + " --out " + recovered) == 6);
    }
    SUBCASE("truncated frame fails with the MalformedFrame code") {
        REQUIRE(run("encrypt " + cred_args() + " --in " + plain + " --out " + frame) == 0);
        auto bytes = slurp(frame);
        bytes.resize(bytes.size() - 5);
        spit(frame, bytes);
        CHECK(run("decrypt " + cred_args() + " --in " + frame + " --out " + recovered) == 5);
    }
    SUBCASE("credential bytes never reach the frame file or stdout") {
        std::string out;
        REQUIRE(run("encrypt " + cred_args() + " --in " + plain + " --out " + frame, &out) == 0);
        const auto frame_bytes = slurp(frame);
        const std::string frame_text(frame_bytes.begin(), frame_bytes.end());
        CHECK(frame_text.find("cli-password") == std::string::npos);
        CHECK(frame_text.find("cli-device") == std::string::npos);
        CHECK(out.find("cli-password") == std::string::npos);
        CHECK(out.find("cli-device") == std::string::npos);
    }
    SUBCASE("missing input file fails with the IO code") {
        CHECK(run("encrypt " + cred_args() + " --in " + path_in_scratch("nope.txt") + " --out " +
                  frame) == 3);
    }
    SUBCASE("unreadable LUT fails with the LUT code") {
        const std::string bad_lut = path_in_scratch("bad.lut");
        spit(bad_lut, std::string("1,2,3\n"));
        CHECK(run("encrypt --lut " + bad_lut + " --id d --pw p --in " + plain + " --out " + frame) == 9);
    }
}

TEST_CASE("send and recv transfer a message over loopback TCP") {
    const std::string plain = path_in_scratch("wire.txt");
    const std::string rx = path_in_scratch("wire.out");
    spit(plain, std::string("Keyless"));

    const std::uint16_t port = free_port();
    const std::string recv_cmd = kCli + " recv " + cred_args() + " --port " +
                                 std::to_string(port) + " --out " + rx + " 2>" +
                                 path_in_scratch("recv.err");
    FILE* recv_proc = popen(recv_cmd.c_str(), "r");
    REQUIRE(recv_proc != nullptr);

    int send_rc = -1;
    for (int attempt = 0; attempt < 50; ++attempt) {
        send_rc = run("send " + cred_args() + " --port " + std::to_string(port) + " --in " + plain);
        if (send_rc == 0) {
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    const int recv_status = pclose(recv_proc);

    CHECK(send_rc == 0);
    REQUIRE(WIFEXITED(recv_status));
    CHECK(WEXITSTATUS(recv_status) == 0);
    CHECK(slurp(rx) == slurp(plain));
}

TEST_CASE("recv with a mismatched table rejects the message") {
    const std::string plain = path_in_scratch("wire2.txt");
    spit(plain, std::string("secret"));
    const std::string other_lut = path_in_scratch("recv-other.lut");
    REQUIRE(run("lutgen --seed 4242 --out " + other_lut) == 0);

    const std::uint16_t port = free_port();
    const std::string recv_cmd = kCli + " recv --lut " + other_lut +
                                 " --id cli-device --pw cli-password --port " +
                                 std::to_string(port) + " --out " + path_in_scratch("wire2.out") +
                                 " 2>" + path_in_scratch("recv2.err");
    FILE* recv_proc = popen(recv_cmd.c_str(), "r");
    REQUIRE(recv_proc != nullptr);

    int send_rc = -1;
    for (int attempt = 0; attempt < 50; ++attempt) {
        send_rc = run("send " + cred_args() + " --port " + std::to_string(port) + " --in " + plain);
        if (send_rc == 0) {
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    const int recv_status = pclose(recv_proc);

    CHECK(send_rc == 0);
    REQUIRE(WIFEXITED(recv_status));
    CHECK(WEXITSTATUS(recv_status) == 6);
}

TEST_CASE("send to a dead port fails with the transport code") {
    const std::string plain = path_in_scratch("dead.txt");
    spit(plain, std::string("x"));
    CHECK(run("send " + cred_args() + " --port " + std::to_string(free_port()) + " --in " + plain) == 7);
}

TEST_CASE("kat vectors") {
    const std::string kat1 = path_in_scratch("kat1.txt");
    const std::string kat2 = path_in_scratch("kat2.txt");
    REQUIRE(run("kat --out " + kat1) == 0);
    REQUIRE(run("kat --out " + kat2) == 0);

    SUBCASE("regeneration is byte-identical") {
        CHECK(slurp(kat1) == slurp(kat2));
    }
    SUBCASE("matches the committed golden file") {
        CHECK(slurp(kat1) == slurp(KAT_GOLDEN_PATH));
    }
    SUBCASE("contains the demo nibble vector") {
        const auto records = parse_kat(kat1);
        REQUIRE(records.count("vec0.nibbles") == 1);
        CHECK(records.at("vec0.nibbles") == "040b06050709060c060507030703");
    }
    SUBCASE("every frame decrypts to its plaintext") {
        const auto records = parse_kat(kat1);
        for (int i = 0;; ++i) {
            const std::string prefix = "vec" + std::to_string(i) + ".";
            if (records.count(prefix + "frame") == 0) {
                CHECK(i >= 3);
                break;
            }
            const auto id = kem::from_hex(records.at(prefix + "id"));
            const auto pw = kem::from_hex(records.at(prefix + "pw"));
            const auto seed_bytes = kem::from_hex(records.at(prefix + "lut_seed"));
            const auto plaintext = kem::from_hex(records.at(prefix + "plaintext"));
            const auto frame = kem::from_hex(records.at(prefix + "frame"));
            const auto rn_bytes = kem::from_hex(records.at(prefix + "rn"));
            REQUIRE(id);
            REQUIRE(pw);
            REQUIRE(seed_bytes);
            REQUIRE(plaintext);
            REQUIRE(frame);
            REQUIRE(rn_bytes);

            kem::Credentials cred;
            cred.id = kem::normalize_credential(*id);
            cred.pw = kem::normalize_credential(*pw);
            std::uint64_t seed = 0;
            for (std::uint8_t b : *seed_bytes) {
                seed = (seed << 8) | b;
            }

            const auto [rn, cipher] = kem::decode_frame(*frame);
            CHECK(kem::to_hex(rn.bytes) == records.at(prefix + "rn"));
            CHECK(kem::decrypt_message(cipher, cred, rn, kem::generate_image(seed)) == *plaintext);
        }
    }
}
