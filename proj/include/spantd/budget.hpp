#pragma once

#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <utility>

#include "spantd/common.hpp"

namespace spantd {

// Tracks allocated bits of long-lived structures, per tag, with a peak
// snapshot. Every structure in the space-disciplined modules registers its
// allocations here so peaks are measurable per run.
class BitBudget {
public:
    void acquire(const std::string& tag, u64 bits) {
        std::lock_guard<std::mutex> lk(mu_);
        now_[tag] += bits;
        current_ += bits;
        if (current_ > peak_) {
            peak_ = current_;
            at_peak_ = now_;
        }
    }

    void release(const std::string& tag, u64 bits) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = now_.find(tag);
        if (it == now_.end() || it->second < bits || current_ < bits)
            fail("bit budget release exceeds acquisition for tag " + tag);
        it->second -= bits;
        if (it->second == 0) now_.erase(it);
        current_ -= bits;
    }

    u64 current() const {
        std::lock_guard<std::mutex> lk(mu_);
        return current_;
    }

    u64 peak() const {
        std::lock_guard<std::mutex> lk(mu_);
        return peak_;
    }

    void reset() {
        std::lock_guard<std::mutex> lk(mu_);
        now_.clear();
        at_peak_.clear();
        current_ = 0;
        peak_ = 0;
    }

    // Per-tag sizes captured at the moment the peak was reached; they sum to
    // peak().
    void report(std::ostream& os) const {
        std::lock_guard<std::mutex> lk(mu_);
        os << "bit budget peak " << peak_ << " bits\n";
        for (const auto& [tag, bits] : at_peak_)
            os << "  " << tag << " " << bits << "\n";
    }

    static BitBudget& global() {
        static BitBudget g;
        return g;
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, u64> now_;
    std::map<std::string, u64> at_peak_;
    u64 current_ = 0;
    u64 peak_ = 0;
};

// RAII registration of one structure's bits with a budget. A null budget
// disables tracking (used by short-lived test helpers).
class BudgetLease {
public:
    BudgetLease() = default;
    BudgetLease(BitBudget* budget, std::string tag, u64 bits)
        : budget_(budget), tag_(std::move(tag)), bits_(bits) {
        if (budget_ && bits_) budget_->acquire(tag_, bits_);
    }
    BudgetLease(const BudgetLease& o) : BudgetLease(o.budget_, o.tag_, o.bits_) {}
    BudgetLease& operator=(const BudgetLease& o) {
        if (this != &o) {
            drop();
            budget_ = o.budget_;
            tag_ = o.tag_;
            bits_ = o.bits_;
            if (budget_ && bits_) budget_->acquire(tag_, bits_);
        }
        return *this;
    }
    BudgetLease(BudgetLease&& o) noexcept { swap(o); }
    BudgetLease& operator=(BudgetLease&& o) noexcept {
        drop();
        budget_ = nullptr;
        tag_.clear();
        bits_ = 0;
        swap(o);
        return *this;
    }
    ~BudgetLease() { drop(); }

    void resize(u64 bits) {
        if (!budget_) {
            bits_ = bits;
            return;
        }
        if (bits > bits_) budget_->acquire(tag_, bits - bits_);
        if (bits < bits_) budget_->release(tag_, bits_ - bits);
        bits_ = bits;
    }

    u64 bits() const { return bits_; }

private:
    void drop() {
        if (budget_ && bits_) budget_->release(tag_, bits_);
    }
    void swap(BudgetLease& o) {
        std::swap(budget_, o.budget_);
        std::swap(tag_, o.tag_);
        std::swap(bits_, o.bits_);
    }

    BitBudget* budget_ = nullptr;
    std::string tag_;
    u64 bits_ = 0;
};

}  // namespace spantd
