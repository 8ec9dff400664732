#pragma once

#include <vector>

#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/common.hpp"

namespace spantd {

// Subset of {1..n} with constant-time contains/add/remove and iteration
// linear in the member count. Realized as a member array plus a position
// array; initialization zeroes the position array, so construction costs
// O(n) time (documented; queries and iteration meet their contracts).
class ChoiceDict {
public:
    ChoiceDict() = default;
    explicit ChoiceDict(u32 n, BitBudget* budget = nullptr, const char* tag = "choice_dict")
        : n_(n), pos_(n + 1, 0) {
        lease_ = BudgetLease(budget, tag, alloc_bits());
    }

    u32 universe() const { return n_; }
    u32 size() const { return static_cast<u32>(members_.size()); }
    bool empty() const { return members_.empty(); }

    bool contains(u32 v) const {
        check(v);
        return pos_[v] != 0;
    }

    void add(u32 v) {
        check(v);
        if (pos_[v]) return;
        members_.push_back(v);
        pos_[v] = static_cast<u32>(members_.size());
        lease_.resize(alloc_bits());
    }

    void remove(u32 v) {
        check(v);
        u32 p = pos_[v];
        if (!p) return;
        u32 last = members_.back();
        members_[p - 1] = last;
        pos_[last] = p;
        members_.pop_back();
        pos_[v] = 0;
        lease_.resize(alloc_bits());
    }

    void clear() {
        for (u32 v : members_) pos_[v] = 0;
        members_.clear();
        lease_.resize(alloc_bits());
    }

    // Members in insertion order (stable until a remove reorders the tail).
    const std::vector<u32>& members() const { return members_; }

    u64 alloc_bits() const {
        return u64(pos_.size()) * 32 + u64(members_.size()) * 32;
    }

private:
    void check(u32 v) const {
        if (v == 0 || v > n_) fail("choice dictionary element out of range");
    }

    u32 n_ = 0;
    std::vector<u32> pos_;
    std::vector<u32> members_;
    BudgetLease lease_;
};

// Fixed key set over universe 1..n with a b-bit payload per key. Keys are
// frozen at construction; reads return the last written value. Storage is
// the key bitmap plus |K| packed payload fields.
class StaticAlloc {
public:
    StaticAlloc() = default;
    StaticAlloc(const BitVec& keys, u32 payload_bits, BitBudget* budget = nullptr,
                const char* tag = "static_alloc")
        : keys_(&keys), b_(payload_bits) {
        if (b_ == 0 || b_ > 64) fail("payload width out of range");
        nkeys_ = keys.count();
        data_.assign((u64(nkeys_) * b_ + 63) / 64, 0);
        lease_ = BudgetLease(budget, tag, u64(data_.size()) * 64);
    }

    bool has(u32 v) const { return keys_ && v >= 1 && v <= keys_->size() && keys_->get(v); }

    void write(u32 v, u64 val) {
        u64 idx = key_index(v);
        if (b_ < 64 && (val >> b_) != 0) fail("payload value exceeds field width");
        set_field(idx, val);
    }

    u64 read(u32 v) const { return get_field(key_index(v)); }

    u32 payload_bits() const { return b_; }
    u64 key_count() const { return nkeys_; }

private:
    u64 key_index(u32 v) const {
        if (!has(v)) fail("static allocation read/write outside key set");
        return keys_->rank(v) - 1;
    }

    void set_field(u64 idx, u64 val) {
        u64 bit = idx * b_;
        u64 w = bit >> 6, off = bit & 63;
        u64 mask = (b_ == 64) ? ~u64(0) : ((u64(1) << b_) - 1);
        data_[w] = (data_[w] & ~(mask << off)) | (val << off);
        if (off + b_ > 64) {
            u64 hi = b_ - (64 - off);
            u64 himask = (u64(1) << hi) - 1;
            data_[w + 1] = (data_[w + 1] & ~himask) | (val >> (64 - off));
        }
    }

    u64 get_field(u64 idx) const {
        u64 bit = idx * b_;
        u64 w = bit >> 6, off = bit & 63;
        u64 mask = (b_ == 64) ? ~u64(0) : ((u64(1) << b_) - 1);
        u64 val = data_[w] >> off;
        if (off + b_ > 64) val |= data_[w + 1] << (64 - off);
        return val & mask;
    }

    const BitVec* keys_ = nullptr;
    u32 b_ = 0;
    u64 nkeys_ = 0;
    std::vector<u64> data_;
    BudgetLease lease_;
};

}  // namespace spantd
