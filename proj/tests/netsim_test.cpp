#include <gtest/gtest.h>

#include "scmci/netsim.hpp"

namespace scmci {
namespace {

WireMessage make_msg(std::uint8_t from, std::uint8_t to, std::uint32_t seq,
                     const std::string& body) {
    WireMessage msg;
    msg.msg_type = MsgType::kPurchase;
    msg.sender = from;
    msg.receiver = to;
    msg.seq = seq;
    msg.payload = bytes_of(body);
    return msg;
}

TEST(Bus, NoHookDeliversInOrder) {
    Bus bus;
    std::vector<std::string> received;
    bus.register_handler(ParticipantId::kMerchant,
                         [&](const WireMessage& m) { received.push_back(string_of(m.payload)); });
    bus.send(make_msg(1, 2, 0, "first"));
    bus.send(make_msg(1, 2, 1, "second"));
    bus.send(make_msg(1, 2, 2, "third"));
    bus.run_until_idle();

    EXPECT_EQ(received, (std::vector<std::string>{"first", "second", "third"}));
    ASSERT_EQ(bus.transcript().size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(bus.transcript()[i].flag, FrameFlag::kDelivered);
        EXPECT_EQ(bus.transcript()[i].msg.seq, i);
    }
}

TEST(Bus, AbsorbingHookSwallowsEverything) {
    Bus bus;
    int handled = 0;
    bus.register_handler(ParticipantId::kMerchant, [&](const WireMessage&) { ++handled; });
    bus.set_hook([](WireMessage&, std::vector<WireMessage>&) { return false; });
    for (int i = 0; i < 5; ++i) bus.send(make_msg(1, 2, i, "x"));
    bus.run_until_idle();

    EXPECT_EQ(handled, 0);
    EXPECT_EQ(bus.transcript().size(), 5u);
    for (const auto& e : bus.transcript().entries())
        EXPECT_EQ(e.flag, FrameFlag::kIntercepted);
    EXPECT_EQ(bus.stats().dropped, 5u);
    EXPECT_EQ(bus.stats().delivered, 0u);
}

TEST(Bus, ModifyingHookFlagsFrame) {
    Bus bus;
    std::string seen;
    bus.register_handler(ParticipantId::kMerchant,
                         [&](const WireMessage& m) { seen = string_of(m.payload); });
    bus.set_hook([](WireMessage& m, std::vector<WireMessage>&) {
        m.payload = bytes_of("mauled");
        return true;
    });
    bus.send(make_msg(1, 2, 0, "honest"));
    bus.run_until_idle();

    EXPECT_EQ(seen, "mauled");
    EXPECT_EQ(bus.transcript()[0].flag, FrameFlag::kModified);
    EXPECT_EQ(bus.stats().modified, 1u);
}

TEST(Bus, InjectedFramesFollowTriggerAndSkipHook) {
    Bus bus;
    std::vector<std::uint32_t> order;
    bus.register_handler(ParticipantId::kMerchant,
                         [&](const WireMessage& m) { order.push_back(m.seq); });
    int hook_calls = 0;
    bus.set_hook([&](WireMessage& m, std::vector<WireMessage>& inject) {
        ++hook_calls;
        if (m.seq == 0) inject.push_back(make_msg(7, 2, 100, "spoof"));
        return true;
    });
    bus.send(make_msg(1, 2, 0, "a"));
    bus.send(make_msg(1, 2, 1, "b"));
    bus.run_until_idle();

    EXPECT_EQ(order, (std::vector<std::uint32_t>{0, 100, 1}));
    EXPECT_EQ(hook_calls, 2);  // injected frame not re-tapped
    EXPECT_EQ(bus.transcript()[1].flag, FrameFlag::kInjected);
}

TEST(Bus, ConservationOfFrames) {
    Bus bus;
    bus.register_handler(ParticipantId::kMerchant, [](const WireMessage&) {});
    bus.set_hook([](WireMessage& m, std::vector<WireMessage>& inject) {
        if (m.seq % 3 == 0) return false;                                  // drop
        if (m.seq % 3 == 1) m.payload.push_back(0xff);                     // modify
        if (m.seq == 5) inject.push_back(make_msg(7, 2, 1000, "spoof"));   // inject
        return true;
    });
    for (int i = 0; i < 9; ++i) bus.send(make_msg(1, 2, i, "m"));
    bus.run_until_idle();

    const BusStats& s = bus.stats();
    EXPECT_EQ(s.sent, 9u);
    EXPECT_EQ(s.injected, 1u);
    EXPECT_EQ(s.delivered + s.dropped + s.modified, s.sent + s.injected);
}

TEST(Bus, HandlersMayEnqueueDuringDispatch) {
    Bus bus;
    std::vector<std::string> log;
    bus.register_handler(ParticipantId::kMerchant, [&](const WireMessage& m) {
        log.push_back("M:" + string_of(m.payload));
        if (string_of(m.payload) == "ping") {
            WireMessage reply = make_msg(2, 1, 0, "pong");
            reply.msg_type = MsgType::kGoods;
            bus.send(reply);
        }
    });
    bus.register_handler(ParticipantId::kCustomer,
                         [&](const WireMessage& m) { log.push_back("C:" + string_of(m.payload)); });
    bus.send(make_msg(1, 2, 0, "ping"));
    bus.run_until_idle();
    EXPECT_EQ(log, (std::vector<std::string>{"M:ping", "C:pong"}));
}

TEST(Bus, BroadcastReachesEveryoneButSender) {
    Bus bus;
    std::vector<std::string> got;
    for (auto id : {ParticipantId::kCustomer, ParticipantId::kMerchant, ParticipantId::kGateway}) {
        bus.register_handler(id, [&got, id](const WireMessage&) {
            got.push_back(participant_name(id));
        });
    }
    WireMessage msg = make_msg(1, kBroadcastId, 0, "cert");
    msg.msg_type = MsgType::kCertExchange;
    bus.send(msg);
    bus.run_until_idle();
    EXPECT_EQ(got, (std::vector<std::string>{"M", "PG"}));
}

TEST(Bus, UnknownReceiverThrows) {
    Bus bus;
    bus.send(make_msg(1, 5, 0, "x"));
    EXPECT_THROW(bus.run_until_idle(), UnknownReceiver);
}

TEST(Bus, DeterministicTranscriptAcrossRuns) {
    auto run = [] {
        Bus bus;
        bus.register_handler(ParticipantId::kMerchant, [](const WireMessage&) {});
        bus.set_hook([](WireMessage& m, std::vector<WireMessage>&) { return m.seq != 2; });
        for (int i = 0; i < 6; ++i) bus.send(make_msg(1, 2, i, "payload"));
        bus.run_until_idle();
        return bus.transcript().checksum();
    };
    EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace scmci
