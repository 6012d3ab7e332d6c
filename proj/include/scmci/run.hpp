// Orchestration of a full protocol run: builds the parties from one seed,
// drives setup / purchase / settlement / delivery in step order over the bus,
// and reports per-phase crypto-operation counts plus the final ledgers.
#pragma once

#include <memory>
#include <string>

#include "scmci/netsim.hpp"
#include "scmci/protocol.hpp"
#include "scmci/rng.hpp"

namespace scmci::proto {

struct ScmciConfig {
    std::uint64_t seed = 42;
    unsigned rsa_bits = 512;
    std::size_t sym_key_len = 16;
    HashAlgorithm algorithm = HashAlgorithm::kMd5;
    SealingMode sealing = SealingMode::kTextbook;

    OrderSummary order{1001, bytes_of("2 pens, 1 notebook"), 2500, "USD"};
    PurchaseDetails card{1001, "4111111111111111", "1227", 2500};
    std::int64_t cb_balance_cents = 10000;
    std::int64_t mb_balance_cents = 0;
    std::string expiry_floor = "0125";  // MMYY lower bound for card validity
};

struct RunResult {
    bool completed = false;
    int failed_step = 0;
    std::string failure;
    OpCounts setup_ops;
    OpCounts purchase_ops;   // order composition through bank authorization
    OpCounts settlement_ops;  // authorization response through goods delivery
    std::int64_t cb_balance_after = 0;
    std::int64_t mb_balance_after = 0;
    std::string transcript_checksum;
};

class ProtocolRun {
public:
    explicit ProtocolRun(ScmciConfig cfg)
        : cfg_(std::move(cfg)), journal_(std::make_shared<RunJournal>()) {
        boot_snapshot_ = op_snapshot();

        PartyConfig pc{cfg_.seed, cfg_.sym_key_len, cfg_.algorithm, cfg_.sealing};
        auto keys_for = [&](const char* label) {
            return keygen_rsa(sub_seed(cfg_.seed, label), cfg_.rsa_bits);
        };
        ca_ = std::make_unique<CertificateAuthority>(keys_for("rsa-CA"), cfg_.algorithm);

        customer_ = std::make_unique<Customer>(ParticipantId::kCustomer, pc, keys_for("rsa-C"),
                                               ca_->root_key(), journal_);
        merchant_ = std::make_unique<Merchant>(ParticipantId::kMerchant, pc, keys_for("rsa-M"),
                                               ca_->root_key(), journal_);
        gateway_ = std::make_unique<Gateway>(ParticipantId::kGateway, pc, keys_for("rsa-PG"),
                                             ca_->root_key(), journal_);
        issuer_ = std::make_unique<IssuerBank>(ParticipantId::kCustomerBank, pc,
                                               keys_for("rsa-CB"), ca_->root_key(), journal_);
        acquirer_ = std::make_unique<AcquirerBank>(ParticipantId::kMerchantBank, pc,
                                                   keys_for("rsa-MB"), ca_->root_key(), journal_);

        // Registration: every participant obtains its certificate before the
        // protocol starts.
        for (Party* p : parties()) p->adopt_certificate(ca_->issue(p->id(), p->rsa().pub()));
        for (Party* p : parties()) p->attach(bus_);

        issuer_->configure(cfg_.expiry_floor);
        issuer_->ledger().open_account(cfg_.card.card_number, cfg_.cb_balance_cents);
        acquirer_->ledger().open_account(AcquirerBank::kMerchantAccount, cfg_.mb_balance_cents);
    }

    Bus& bus() { return bus_; }
    const RunJournal& journal() const { return *journal_; }
    const ScmciConfig& config() const { return cfg_; }

    Customer& customer() { return *customer_; }
    Merchant& merchant() { return *merchant_; }
    Gateway& gateway() { return *gateway_; }
    IssuerBank& issuer_bank() { return *issuer_; }
    AcquirerBank& acquirer_bank() { return *acquirer_; }

    std::vector<Party*> parties() {
        return {customer_.get(), merchant_.get(), gateway_.get(), issuer_.get(), acquirer_.get()};
    }

    // Steps 1-13.
    bool run_setup() {
        journal_->log(1, "participants exchange certificates");
        for (Party* p : parties()) {
            p->broadcast_certificate();
        }
        bus_.run_until_idle();
        if (journal_->aborted()) return finish_phase(&setup_ops_);

        journal_->log(2, "session keys generated pairwise by their originators");
        merchant_->distribute_order_key();
        bus_.run_until_idle();
        if (journal_->aborted()) return finish_phase(&setup_ops_);

        struct Dist {
            KeyId key;
            ParticipantId to;
            int gen_step, send_step;
        };
        const Dist plan[] = {
            {KeyId::kSk2, ParticipantId::kMerchant, 5, 6},
            {KeyId::kSk5, ParticipantId::kCustomer, 7, 8},
            {KeyId::kSk3, ParticipantId::kCustomerBank, 9, 10},
            {KeyId::kSk4, ParticipantId::kMerchantBank, 11, 12},
        };
        for (const Dist& d : plan) {
            gateway_->distribute_key(d.key, d.to, d.gen_step, d.send_step);
            bus_.run_until_idle();
            if (journal_->aborted()) return finish_phase(&setup_ops_);
        }

        if (!lookup_tables_complete()) {
            journal_->fail(13, "lookup tables incomplete after key distribution");
            return finish_phase(&setup_ops_);
        }
        journal_->log(13, "lookup tables complete for all participants");
        return finish_phase(&setup_ops_);
    }

    // Steps 14-24: compose and send the purchase; the reactive chain carries
    // it merchant -> gateway -> issuer bank -> authorization at the gateway.
    bool run_purchase() {
        const OpCounts snap = op_snapshot();
        try {
            PurchaseBundle bundle = customer_->compose_purchase(cfg_.order, cfg_.card);
            customer_->send_purchase(bundle);
        } catch (const std::exception& e) {
            journal_->fail(14, e.what());
            purchase_ops_ = ops_since(snap);
            return false;
        }
        bus_.run_until_idle();
        purchase_ops_ = ops_since(snap);
        if (journal_->aborted()) return false;
        if (!gateway_->has_authorization(cfg_.order.order_id)) {
            journal_->fail(24, "no authorized information reached the gateway");
            return false;
        }
        if (!gateway_->authorization(cfg_.order.order_id).approved) {
            journal_->fail(23, std::string("authorization declined: ") +
                                   auth_reason_name(
                                       gateway_->authorization(cfg_.order.order_id).reason));
            return false;
        }
        return true;
    }

    // Steps 25-29.
    bool run_settlement() {
        const OpCounts snap = op_snapshot();
        const std::uint64_t order_id = cfg_.order.order_id;
        try {
            gateway_->send_auth_response(order_id);
            bus_.run_until_idle();
            if (journal_->aborted()) return accumulate_settlement(snap);

            issuer_->debit_and_respond(order_id);
            bus_.run_until_idle();
            if (journal_->aborted()) return accumulate_settlement(snap);

            gateway_->redirect_payment_response(order_id);
            bus_.run_until_idle();
            if (journal_->aborted()) return accumulate_settlement(snap);

            gateway_->relay_payment_response(order_id);
            bus_.run_until_idle();
        } catch (const DoubleSettlement& e) {
            journal_->fail(26, std::string("DoubleSettlement: ") + e.what());
        } catch (const std::exception& e) {
            journal_->fail(25, e.what());
        }
        return accumulate_settlement(snap);
    }

    // Step 30.
    bool run_delivery() {
        const OpCounts snap = op_snapshot();
        try {
            merchant_->deliver_goods();
            bus_.run_until_idle();
        } catch (const NotSettled& e) {
            journal_->fail(30, std::string("NotSettled: ") + e.what());
        }
        settlement_ops_ = settlement_ops_ + (op_counts() - snap);
        return !journal_->aborted() && customer_->goods_received();
    }

    RunResult run_all() {
        bool ok = run_setup() && run_purchase() && run_settlement() && run_delivery();
        RunResult result;
        result.completed = ok && !journal_->aborted();
        result.failed_step = journal_->abort_step();
        result.failure = journal_->abort_reason();
        result.setup_ops = setup_ops_;
        result.purchase_ops = purchase_ops_;
        result.settlement_ops = settlement_ops_;
        result.cb_balance_after = issuer_->ledger().balance(cfg_.card.card_number);
        result.mb_balance_after = acquirer_->ledger().balance(AcquirerBank::kMerchantAccount);
        result.transcript_checksum = bus_.transcript().checksum();
        return result;
    }

    OpCounts setup_ops() const { return setup_ops_; }
    OpCounts purchase_ops() const { return purchase_ops_; }
    OpCounts settlement_ops() const { return settlement_ops_; }

    bool lookup_tables_complete() const {
        auto holds = [](const Party& p, std::initializer_list<KeyId> keys) {
            if (p.session_keys().size() != keys.size()) return false;
            for (KeyId k : keys)
                if (!p.has_key(k)) return false;
            return true;
        };
        return holds(*customer_, {KeyId::kSk1, KeyId::kSk5}) &&
               holds(*merchant_, {KeyId::kSk1, KeyId::kSk2}) &&
               holds(*gateway_, {KeyId::kSk2, KeyId::kSk3, KeyId::kSk4, KeyId::kSk5}) &&
               holds(*issuer_, {KeyId::kSk3}) && holds(*acquirer_, {KeyId::kSk4});
    }

private:
    bool finish_phase(OpCounts* slot) {
        *slot = ops_since(boot_snapshot_);
        return !journal_->aborted();
    }

    bool accumulate_settlement(const OpCounts& snap) {
        settlement_ops_ = settlement_ops_ + (op_counts() - snap);
        return !journal_->aborted();
    }

    ScmciConfig cfg_;
    std::shared_ptr<RunJournal> journal_;
    Bus bus_;
    std::unique_ptr<CertificateAuthority> ca_;
    std::unique_ptr<Customer> customer_;
    std::unique_ptr<Merchant> merchant_;
    std::unique_ptr<Gateway> gateway_;
    std::unique_ptr<IssuerBank> issuer_;
    std::unique_ptr<AcquirerBank> acquirer_;
    OpCounts boot_snapshot_;
    OpCounts setup_ops_;
    OpCounts purchase_ops_;
    OpCounts settlement_ops_;
};

}  // namespace scmci::proto
