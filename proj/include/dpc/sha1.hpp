#ifndef DPC_SHA1_HPP
#define DPC_SHA1_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <string>

namespace dpc {

/// SHA-1 (FIPS 180-4). Used for git-style content hashes in run manifests;
/// not a security boundary here.
class Sha1 {
public:
    Sha1() { reset(); }

    void reset() {
        h_ = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
        length_ = 0;
        buffer_fill_ = 0;
    }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        length_ += static_cast<std::uint64_t>(len) * 8;
        while (len > 0) {
            const std::size_t take = std::min(len, std::size_t(64) - buffer_fill_);
            std::memcpy(buffer_ + buffer_fill_, p, take);
            buffer_fill_ += take;
            p += take;
            len -= take;
            if (buffer_fill_ == 64) {
                process_block(buffer_);
                buffer_fill_ = 0;
            }
        }
    }

    void update(const std::string& s) { update(s.data(), s.size()); }

    std::string hex_digest() {
        const std::uint64_t bit_length = length_;
        unsigned char pad = 0x80;
        update(&pad, 1);
        const unsigned char zero = 0x00;
        while (buffer_fill_ != 56) update(&zero, 1);
        unsigned char len_bytes[8];
        for (int i = 0; i < 8; ++i)
            len_bytes[i] = static_cast<unsigned char>(bit_length >> (56 - 8 * i));
        update(len_bytes, 8);

        static const char* digits = "0123456789abcdef";
        std::string out;
        out.reserve(40);
        for (std::uint32_t word : h_)
            for (int shift = 28; shift >= 0; shift -= 4)
                out.push_back(digits[(word >> shift) & 0xF]);
        return out;
    }

private:
    static std::uint32_t rotl(std::uint32_t x, int k) { return (x << k) | (x >> (32 - k)); }

    void process_block(const unsigned char* block) {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                   (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        for (int i = 16; i < 80; ++i)
            w[i] = rotl(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

        std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t tmp = rotl(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rotl(b, 30);
            b = a;
            a = tmp;
        }
        h_[0] += a;
        h_[1] += b;
        h_[2] += c;
        h_[3] += d;
        h_[4] += e;
    }

    std::array<std::uint32_t, 5> h_{};
    std::uint64_t length_ = 0;
    unsigned char buffer_[64] = {};
    std::size_t buffer_fill_ = 0;
};

inline std::string sha1_hex(const std::string& content) {
    Sha1 h;
    h.update(content);
    return h.hex_digest();
}

/// Hash of `content` as git would hash a blob object.
inline std::string git_blob_sha1(const std::string& content) {
    Sha1 h;
    h.update("blob " + std::to_string(content.size()));
    h.update("\0", 1);
    h.update(content);
    return h.hex_digest();
}

}  // namespace dpc

#endif
