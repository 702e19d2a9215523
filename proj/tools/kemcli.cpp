// kemcli: keyless encryption demo tool.
// Subcommands: lutgen, encrypt, decrypt, send, recv, kat. See README for
// the exit code table and file formats.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <termios.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "kem/cipher_core.hpp"
#include "kem/digest_schedule.hpp"
#include "kem/errors.hpp"
#include "kem/hex.hpp"
#include "kem/kat.hpp"
#include "kem/memristor_image.hpp"
#include "kem/tcp_stream.hpp"
#include "kem/wire_protocol.hpp"

namespace {

// Stable exit codes, documented in the README.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kIo = 3,
    kPlaintextSize = 4,
    kBadFrame = 5,
    kCorruptCipher = 6,
    kTransport = 7,
    kNonce = 8,
    kLut = 9,
    kCredential = 10,
};

struct ErrorInfo {
    const char* name;
    int code;
};

ErrorInfo classify(const kem::Error& e) {
    if (dynamic_cast<const kem::CorruptCipher*>(&e)) return {"CorruptCipher", kCorruptCipher};
    if (dynamic_cast<const kem::MalformedCipher*>(&e)) return {"MalformedCipher", kBadFrame};
    if (dynamic_cast<const kem::EmptyPlaintext*>(&e)) return {"EmptyPlaintext", kPlaintextSize};
    if (dynamic_cast<const kem::MessageTooLong*>(&e)) return {"MessageTooLong", kPlaintextSize};
    if (dynamic_cast<const kem::WrongProtocol*>(&e)) return {"WrongProtocol", kBadFrame};
    if (dynamic_cast<const kem::UnsupportedVersion*>(&e)) return {"UnsupportedVersion", kBadFrame};
    if (dynamic_cast<const kem::MalformedFrame*>(&e)) return {"MalformedFrame", kBadFrame};
    if (dynamic_cast<const kem::CorruptFrame*>(&e)) return {"CorruptFrame", kBadFrame};
    if (dynamic_cast<const kem::NonceFormatError*>(&e)) return {"NonceFormatError", kNonce};
    if (dynamic_cast<const kem::NoSavedNonce*>(&e)) return {"NoSavedNonce", kNonce};
    if (dynamic_cast<const kem::TransportError*>(&e)) return {"TransportError", kTransport};
    if (dynamic_cast<const kem::ImageFormatError*>(&e)) return {"ImageFormatError", kLut};
    if (dynamic_cast<const kem::ImageValueError*>(&e)) return {"ImageValueError", kLut};
    if (dynamic_cast<const kem::ImageIoError*>(&e)) return {"ImageIoError", kLut};
    if (dynamic_cast<const kem::InvalidCredential*>(&e)) return {"InvalidCredential", kCredential};
    if (dynamic_cast<const kem::NibbleRangeError*>(&e)) return {"NibbleRangeError", kCorruptCipher};
    if (dynamic_cast<const kem::IoError*>(&e)) return {"IoError", kIo};
    return {"Error", kFailure};
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw kem::IoError("cannot open " + path + " for reading");
    }
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw kem::IoError("failed reading " + path);
    }
    return data;
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw kem::IoError("cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw kem::IoError("failed writing " + path);
    }
}

std::string prompt_password() {
    std::cerr << "password: " << std::flush;
    termios saved{};
    const bool tty = ::isatty(STDIN_FILENO) == 1;
    if (tty && ::tcgetattr(STDIN_FILENO, &saved) == 0) {
        termios noecho = saved;
        noecho.c_lflag &= ~static_cast<tcflag_t>(ECHO);
        ::tcsetattr(STDIN_FILENO, TCSANOW, &noecho);
    }
    std::string pw;
    std::getline(std::cin, pw);
    if (tty) {
        ::tcsetattr(STDIN_FILENO, TCSANOW, &saved);
        std::cerr << "\n";
    }
    return pw;
}

// Flags shared by the commands that need credentials, a LUT, or a nonce.
struct CommonFlags {
    std::string lut_path;
    std::string id;
    std::string pw;
    std::string pw_env;
    bool pw_prompt = false;
    std::string rn_hex;
    bool rn_system = false;
    bool rn_saved = false;
    std::string rn_file;
};

void add_credential_flags(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("--lut", flags.lut_path, "memristor image file")->required();
    cmd.add_option("--id", flags.id, "device identifier")->required();
    auto* pw = cmd.add_option("--pw", flags.pw, "shared password");
    auto* pw_env = cmd.add_option("--pw-env", flags.pw_env, "environment variable holding the password");
    auto* pw_prompt = cmd.add_flag("--pw-prompt", flags.pw_prompt, "prompt for the password");
    pw->excludes(pw_env)->excludes(pw_prompt);
    pw_env->excludes(pw_prompt);
}

void add_nonce_flags(CLI::App& cmd, CommonFlags& flags) {
    auto* rn = cmd.add_option("--rn", flags.rn_hex, "session nonce, 32 hex characters");
    auto* rn_system = cmd.add_flag("--rn-system", flags.rn_system, "draw the nonce from the OS (default)");
    auto* rn_saved = cmd.add_flag("--rn-saved", flags.rn_saved, "reuse the nonce recorded in --rn-file");
    rn->excludes(rn_system)->excludes(rn_saved);
    rn_system->excludes(rn_saved);
    cmd.add_option("--rn-file", flags.rn_file, "file recording the last nonce used");
}

kem::Credentials load_credentials(const CommonFlags& flags) {
    std::string pw;
    if (!flags.pw.empty()) {
        pw = flags.pw;
    } else if (!flags.pw_env.empty()) {
        const char* value = std::getenv(flags.pw_env.c_str());
        if (value == nullptr) {
            throw kem::InvalidCredential("environment variable " + flags.pw_env + " is not set");
        }
        pw = value;
    } else if (flags.pw_prompt) {
        pw = prompt_password();
    } else {
        throw kem::InvalidCredential("no password source: use --pw, --pw-env, or --pw-prompt");
    }

    kem::Credentials cred;
    cred.id = kem::normalize_credential(flags.id);
    cred.pw = kem::normalize_credential(pw);
    return cred;
}

kem::MemristorImage load_lut(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw kem::ImageIoError("cannot open " + path);
    }
    return kem::load_image(in);
}

std::optional<kem::SessionNonce> read_saved_nonce(const std::string& path) {
    if (path.empty()) {
        return std::nullopt;
    }
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    std::string hex;
    in >> hex;
    const auto bytes = kem::from_hex(hex);
    if (!bytes || bytes->size() != 16) {
        return std::nullopt;
    }
    kem::SessionNonce rn;
    std::copy(bytes->begin(), bytes->end(), rn.bytes.begin());
    return rn;
}

void record_nonce(const std::string& path, const kem::SessionNonce& rn) {
    if (path.empty()) {
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw kem::IoError("cannot open " + path + " for writing");
    }
    out << kem::to_hex(rn.bytes) << "\n";
}

kem::SessionNonce resolve_nonce(const CommonFlags& flags) {
    kem::NonceMode mode = kem::NonceMode::system;
    if (!flags.rn_hex.empty()) {
        mode = kem::NonceMode::provided;
    } else if (flags.rn_saved) {
        mode = kem::NonceMode::saved;
    }
    const auto rn = kem::new_nonce(mode, read_saved_nonce(flags.rn_file), flags.rn_hex);
    record_nonce(flags.rn_file, rn);
    return rn;
}

int cmd_lutgen(std::uint64_t seed, const std::string& out_path) {
    const kem::MemristorImage img = kem::generate_image(seed);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw kem::IoError("cannot open " + out_path + " for writing");
    }
    kem::save_image(img, out);

    double lo = img.cell(0, 0), hi = img.cell(0, 0);
    for (std::size_t a = 0; a < kem::MemristorImage::kAddresses; ++a) {
        for (std::size_t c = 0; c < kem::MemristorImage::kCurrentLevels; ++c) {
            lo = std::min(lo, img.cell(a, c));
            hi = std::max(hi, img.cell(a, c));
        }
    }
    std::cout << "cells: " << kem::MemristorImage::kAddresses * kem::MemristorImage::kCurrentLevels
              << "\nrange: [" << lo << ", " << hi << "] ohms\n";
    return kOk;
}

int cmd_encrypt(const CommonFlags& flags, const std::string& in_path, const std::string& out_path) {
    const auto cred = load_credentials(flags);
    const auto img = load_lut(flags.lut_path);
    const auto rn = resolve_nonce(flags);

    const auto plaintext = read_file(in_path);
    const auto frame = kem::encode_frame(rn, kem::encrypt_message(plaintext, cred, rn, img));
    write_file(out_path, frame);
    std::cout << "rn = " << kem::to_hex(rn.bytes) << "\n";
    return kOk;
}

int cmd_decrypt(const CommonFlags& flags, const std::string& in_path, const std::string& out_path) {
    const auto cred = load_credentials(flags);
    const auto img = load_lut(flags.lut_path);

    const auto frame = read_file(in_path);
    const auto [rn, cipher] = kem::decode_frame(frame);
    const auto plaintext = kem::decrypt_message(cipher, cred, rn, img);
    write_file(out_path, plaintext);
    return kOk;
}

int cmd_send(const CommonFlags& flags, const std::string& host, std::uint16_t port,
             const std::string& in_path) {
    const auto cred = load_credentials(flags);
    const auto img = load_lut(flags.lut_path);
    const auto plaintext = read_file(in_path);

    kem::FdStream stream = kem::tcp_connect(host, port);
    const auto rn = kem::send_message(stream, plaintext, cred, img);
    record_nonce(flags.rn_file, rn);
    std::cout << "rn = " << kem::to_hex(rn.bytes) << "\n";
    return kOk;
}

int cmd_recv(const CommonFlags& flags, const std::string& host, std::uint16_t port,
             const std::string& out_path) {
    const auto cred = load_credentials(flags);
    const auto img = load_lut(flags.lut_path);

    kem::TcpListener listener(host, port);
    kem::FdStream stream = listener.accept();
    const auto plaintext = kem::receive_message(stream, cred, img);

    if (out_path.empty()) {
        std::cout.write(reinterpret_cast<const char*>(plaintext.data()),
                        static_cast<std::streamsize>(plaintext.size()));
        std::cout << "\n";
    } else {
        write_file(out_path, plaintext);
    }
    return kOk;
}

int cmd_kat(const std::string& out_path) {
    if (out_path.empty()) {
        kem::write_kat(std::cout);
        return kOk;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw kem::IoError("cannot open " + out_path + " for writing");
    }
    kem::write_kat(out);
    if (!out) {
        throw kem::IoError("failed writing " + out_path);
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"keyless encryption over a shared memristor image"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* lutgen = app.add_subcommand("lutgen", "generate a deterministic memristor image");
    std::uint64_t seed = 0;
    std::string lutgen_out;
    lutgen->add_option("--seed", seed, "64-bit generator seed")->required();
    lutgen->add_option("--out", lutgen_out, "output path")->required();

    auto* encrypt = app.add_subcommand("encrypt", "encrypt a file into a frame file");
    std::string in_path, out_path;
    add_credential_flags(*encrypt, flags);
    add_nonce_flags(*encrypt, flags);
    encrypt->add_option("--in", in_path, "plaintext file, 1..119 bytes")->required();
    encrypt->add_option("--out", out_path, "frame file to write")->required();

    auto* decrypt = app.add_subcommand("decrypt", "decrypt a frame file");
    add_credential_flags(*decrypt, flags);
    decrypt->add_option("--in", in_path, "frame file")->required();
    decrypt->add_option("--out", out_path, "plaintext file to write")->required();

    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    auto* send = app.add_subcommand("send", "encrypt and send one message over TCP");
    add_credential_flags(*send, flags);
    send->add_option("--host", host, "peer host");
    send->add_option("--port", port, "peer port")->required();
    send->add_option("--in", in_path, "plaintext file")->required();
    send->add_option("--rn-file", flags.rn_file, "record the nonce used");

    auto* recv = app.add_subcommand("recv", "receive and decrypt one message over TCP");
    add_credential_flags(*recv, flags);
    recv->add_option("--host", host, "listen address");
    recv->add_option("--port", port, "listen port")->required();
    recv->add_option("--out", out_path, "write plaintext here instead of stdout");

    auto* kat = app.add_subcommand("kat", "emit the known-answer vector file");
    kat->add_option("--out", out_path, "output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (lutgen->parsed()) return cmd_lutgen(seed, lutgen_out);
        if (encrypt->parsed()) return cmd_encrypt(flags, in_path, out_path);
        if (decrypt->parsed()) return cmd_decrypt(flags, in_path, out_path);
        if (send->parsed()) return cmd_send(flags, host, port, in_path);
        if (recv->parsed()) return cmd_recv(flags, host, port, out_path);
        if (kat->parsed()) return cmd_kat(out_path);
    } catch (const kem::Error& e) {
        const auto [name, code] = classify(e);
        std::cerr << "error: " << name << ": " << e.what() << "\n";
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
