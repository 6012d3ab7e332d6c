// Deterministic in-process message bus: strict FIFO delivery, an optional
// intercept tap that can pass, drop, modify or inject frames, and full
// transcript capture. No latency model, no loss except through the tap.
#pragma once

#include <deque>
#include <functional>
#include <map>
#include <stdexcept>

#include "scmci/participants.hpp"
#include "scmci/wire.hpp"

namespace scmci {

class UnknownReceiver : public std::runtime_error {
public:
    explicit UnknownReceiver(const std::string& what) : std::runtime_error(what) {}
};

struct BusStats {
    std::size_t sent = 0;
    std::size_t injected = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    std::size_t modified = 0;
};

class Bus {
public:
    using Handler = std::function<void(const WireMessage&)>;
    // Return false to swallow the frame. The frame may be modified in place;
    // frames pushed to `inject` enter the queue right after this one.
    using InterceptHook = std::function<bool(WireMessage&, std::vector<WireMessage>& inject)>;

    void register_handler(ParticipantId id, Handler handler) {
        handlers_[static_cast<std::uint8_t>(id)] = std::move(handler);
    }

    void set_hook(InterceptHook hook) { hook_ = std::move(hook); }

    // Enqueue only; delivery happens in run_until_idle. Handlers may call
    // send() while handling a frame, but delivery is never reentrant.
    void send(WireMessage msg) {
        ++stats_.sent;
        queue_.push_back({std::move(msg), false});
    }

    Transcript& transcript() { return transcript_; }
    const Transcript& transcript() const { return transcript_; }
    const BusStats& stats() const { return stats_; }

    void run_until_idle() {
        while (!queue_.empty()) {
            Pending pending = std::move(queue_.front());
            queue_.pop_front();
            dispatch(std::move(pending));
        }
    }

private:
    struct Pending {
        WireMessage msg;
        bool injected;
    };

    void dispatch(Pending pending) {
        WireMessage msg = std::move(pending.msg);
        bool deliver = true;
        bool was_modified = false;
        // Frames the tap itself injected do not pass through the tap again.
        if (hook_ && !pending.injected) {
            const Bytes before = msg.encode();
            std::vector<WireMessage> injected;
            deliver = hook_(msg, injected);
            was_modified = deliver && msg.encode() != before;
            for (auto it = injected.rbegin(); it != injected.rend(); ++it) {
                ++stats_.injected;
                queue_.push_front({std::move(*it), true});
            }
        }

        FrameFlag flag;
        if (!deliver) {
            flag = FrameFlag::kIntercepted;
            ++stats_.dropped;
        } else if (pending.injected) {
            flag = FrameFlag::kInjected;
            ++stats_.delivered;
        } else if (was_modified) {
            flag = FrameFlag::kModified;
            ++stats_.modified;
        } else {
            flag = FrameFlag::kDelivered;
            ++stats_.delivered;
        }
        transcript_.add(msg, flag);
        if (!deliver) return;

        if (msg.receiver == kBroadcastId) {
            for (auto& [id, handler] : handlers_) {
                if (id != msg.sender && handler) handler(msg);
            }
            return;
        }
        auto it = handlers_.find(msg.receiver);
        if (it == handlers_.end() || !it->second)
            throw UnknownReceiver("no handler registered for participant " +
                                  std::to_string(msg.receiver));
        it->second(msg);
    }

    std::deque<Pending> queue_;
    std::map<std::uint8_t, Handler> handlers_;
    InterceptHook hook_;
    Transcript transcript_;
    BusStats stats_;
};

}  // namespace scmci
