#include <gtest/gtest.h>

#include <cstdio>

#include "scmci/rng.hpp"
#include "scmci/wire.hpp"

namespace scmci {
namespace {

WireMessage random_message(DetRng& rng) {
    WireMessage msg;
    msg.msg_type = static_cast<MsgType>(1 + rng.below(11));
    msg.sender = static_cast<std::uint8_t>(1 + rng.below(7));
    msg.receiver = static_cast<std::uint8_t>(rng.below(8));
    msg.seq = rng.next_u32();
    msg.payload = rng.bytes(rng.below(300));
    return msg;
}

TEST(Wire, RoundTripFuzz) {
    DetRng rng(606);
    for (int i = 0; i < 10000; ++i) {
        WireMessage msg = random_message(rng);
        Bytes encoded = msg.encode();
        EXPECT_EQ(encoded.size(), WireMessage::kHeaderSize + msg.payload.size());
        EXPECT_EQ(WireMessage::decode(encoded), msg);
    }
}

TEST(Wire, EmptyPayloadIsHeaderOnly) {
    WireMessage msg;
    msg.msg_type = MsgType::kGoods;
    msg.sender = 2;
    msg.receiver = 1;
    msg.seq = 7;
    EXPECT_EQ(msg.encode().size(), 12u);
}

TEST(Wire, RejectsTruncatedFrames) {
    WireMessage msg;
    msg.msg_type = MsgType::kPurchase;
    msg.sender = 1;
    msg.receiver = 2;
    msg.payload = bytes_of("hello");
    Bytes encoded = msg.encode();

    for (std::size_t len = 0; len < WireMessage::kHeaderSize; ++len) {
        EXPECT_THROW(WireMessage::decode(std::span(encoded.data(), len)), Truncated);
    }
    // declared payload length exceeds the remaining bytes
    EXPECT_THROW(WireMessage::decode(std::span(encoded.data(), encoded.size() - 1)), Truncated);
}

TEST(Wire, RejectsBadVersionAndUnknownType) {
    WireMessage msg;
    msg.msg_type = MsgType::kPurchase;
    msg.sender = 1;
    msg.receiver = 2;
    Bytes encoded = msg.encode();

    Bytes bad_version = encoded;
    bad_version[0] = 9;
    EXPECT_THROW(WireMessage::decode(bad_version), BadVersion);

    Bytes bad_type = encoded;
    bad_type[1] = 0;
    EXPECT_THROW(WireMessage::decode(bad_type), UnknownType);
    bad_type[1] = 200;
    EXPECT_THROW(WireMessage::decode(bad_type), UnknownType);
}

TEST(Transcript, SerializeParseAndFileRoundTrip) {
    DetRng rng(607);
    Transcript t;
    for (int i = 0; i < 20; ++i) t.add(random_message(rng), FrameFlag::kDelivered);

    std::vector<WireMessage> parsed = Transcript::parse(t.serialize());
    ASSERT_EQ(parsed.size(), t.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) EXPECT_EQ(parsed[i], t[i].msg);

    const std::string path = std::string(::testing::TempDir()) + "wire_test.transcript";
    t.save(path);
    std::vector<WireMessage> loaded = Transcript::load(path);
    EXPECT_EQ(loaded, parsed);
    std::remove(path.c_str());
}

TEST(Transcript, ChecksumStableAcrossRebuilds) {
    DetRng rng_a(608), rng_b(608);
    Transcript a, b;
    for (int i = 0; i < 10; ++i) a.add(random_message(rng_a), FrameFlag::kDelivered);
    for (int i = 0; i < 10; ++i) b.add(random_message(rng_b), FrameFlag::kDelivered);
    EXPECT_EQ(a.checksum(), b.checksum());

    b.add(random_message(rng_b), FrameFlag::kDelivered);
    EXPECT_NE(a.checksum(), b.checksum());
}

TEST(Transcript, ParseRejectsCorruptRecords) {
    Bytes data = {0x00, 0x00};
    EXPECT_THROW(Transcript::parse(data), Truncated);
    data = {0x00, 0x00, 0x00, 0x10, 0x01};
    EXPECT_THROW(Transcript::parse(data), Truncated);
}

}  // namespace
}  // namespace scmci
