#include "pdmsort/guidesort.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>
#include <string>

#include "pdmsort/merge_engine.hpp"

namespace pdmsort {

namespace {

bool by_item(const Cell& a, const Cell& b) { return a.item < b.item; }

std::uint32_t u32(std::uint64_t x) { return static_cast<std::uint32_t>(x); }

// Reads a whole block range into frames[0..), up to the run's width per op.
std::vector<Cell> read_sweep(Machine& machine, const BlockView& view, std::span<const std::uint32_t> frames) {
    const std::uint64_t B = machine.block_size();
    const std::uint64_t width = view.run->width;
    std::vector<Cell> cells;
    cells.reserve(view.num_items);
    std::vector<Transfer> t;
    for (std::uint64_t first = 0; first < view.num_blocks; first += width) {
        std::uint64_t cnt = std::min(width, view.num_blocks - first);
        t.clear();
        for (std::uint64_t i = 0; i < cnt; ++i) {
            auto a = view.block(first + i);
            t.push_back({a.disk, a.frame, frames[first + i]});
        }
        machine.input(t);
    }
    for (std::uint64_t j = 0; j < view.num_blocks; ++j) {
        auto blk = machine.frame(frames[j]);
        std::uint64_t n = std::min<std::uint64_t>(B, view.num_items - j * B);
        cells.insert(cells.end(), blk.begin(), blk.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return cells;
}

// Places `cells` into frames[0..) and writes them to `target`, up to its
// width per op.
void write_sweep(Machine& machine, const StripedRun& target, std::span<const Cell> cells,
                 std::span<const std::uint32_t> frames) {
    const std::uint64_t B = machine.block_size();
    for (std::uint64_t j = 0; j < target.num_blocks; ++j) {
        auto blk = machine.frame(frames[j]);
        std::uint64_t n = std::min<std::uint64_t>(B, cells.size() - j * B);
        std::copy_n(cells.begin() + static_cast<std::ptrdiff_t>(j * B), n, blk.begin());
        std::fill(blk.begin() + static_cast<std::ptrdiff_t>(n), blk.end(), kDummyCell);
    }
    std::vector<Transfer> t;
    for (std::uint64_t first = 0; first < target.num_blocks; first += target.width) {
        std::uint64_t cnt = std::min<std::uint64_t>(target.width, target.num_blocks - first);
        t.clear();
        for (std::uint64_t i = 0; i < cnt; ++i) {
            auto a = target.block(first + i);
            t.push_back({a.disk, a.frame, frames[first + i]});
        }
        machine.output(t);
    }
}

Cell leader_record(const Item& item, std::uint32_t run_id, std::uint64_t seg) {
    Cell c;
    c.item = item;
    c.run = run_id;
    c.seg = u32(seg);
    return c;
}

}  // namespace

std::uint64_t segment_count(std::uint64_t num_items, std::uint64_t B, std::uint64_t s) {
    return ceil_div(ceil_div(num_items, B), s);
}

SortedRun base_sort(Machine& machine, const BlockView& input, const GuideParams& params, bool emit_sample,
                    std::uint32_t run_id) {
    const std::uint64_t B = machine.block_size();
    const std::uint64_t p = input.num_blocks;
    if (p > machine.m()) {
        throw std::invalid_argument("base_sort input exceeds memory");
    }
    if (p == 0) {
        throw std::invalid_argument("base_sort of an empty sequence");
    }
    auto buf = machine.reserve(u32(p));
    auto cells = read_sweep(machine, input, buf.frames());
    std::sort(cells.begin(), cells.end(), by_item);

    SortedRun out;
    out.run = allocate_striped(machine, cells.size());
    write_sweep(machine, out.run, cells, buf.frames());

    if (emit_sample) {
        const std::uint64_t step = params.s * B;
        const std::uint64_t count = segment_count(cells.size(), B, params.s);
        out.sample = allocate_striped(machine, count);
        // Leaders stay in memory after the sweep; pack them into the first
        // frames, which have already been written out.
        auto frames = buf.slice(0, std::min<std::uint64_t>(params.dl, out.sample->num_blocks));
        StripedWriter writer(machine, *out.sample, frames);
        for (std::uint64_t k = 0; k < count; ++k) {
            writer.push(leader_record(cells[k * step].item, run_id, k));
        }
        writer.finish();
    }
    return out;
}

// ---- Step 1 -----------------------------------------------------------------

std::size_t SampleTree::leaves() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.leaf(); }));
}

CanonicalResult merge_samples(Machine& machine, std::span<const StripedRun> samples, const GuideParams& params) {
    const std::uint64_t m = machine.m();
    const std::uint32_t D = machine.disks();
    const std::uint32_t k = u32(samples.size());
    if (k < 2) {
        throw std::invalid_argument("merge_samples needs at least two samples");
    }
    CanonicalResult res;
    auto& tree = res.tree;
    for (const auto& s : samples) {
        tree.sample_items.push_back(s.num_items);
    }
    std::vector<StripedRun> seqs;
    std::vector<int> level;

    auto add_leaf = [&](std::uint32_t lo, std::uint32_t hi, StripedRun seq) {
        SampleTree::Node node;
        node.lo = lo;
        node.hi = hi;
        node.num_items = seq.num_items;
        tree.nodes.push_back(node);
        seqs.push_back(std::move(seq));
        level.push_back(static_cast<int>(tree.nodes.size() - 1));
    };

    auto flush_bundle = [&](std::uint32_t lo, std::uint32_t hi, std::uint64_t blocks) {
        if (hi == lo) {
            return;
        }
        if (hi - lo == 1) {
            add_leaf(lo, hi, samples[lo]);
            return;
        }
        auto buf = machine.reserve(u32(blocks));
        std::vector<Transfer> t;
        std::uint32_t f = 0;
        for (std::uint32_t i = lo; i < hi; ++i) {
            for (std::uint64_t j = 0; j < samples[i].num_blocks; ++j) {
                auto a = samples[i].block(j);
                t.push_back({a.disk, a.frame, buf[f++]});
            }
        }
        scattered_input(machine, t);
        std::vector<Cell> cells;
        const std::uint64_t B = machine.block_size();
        f = 0;
        for (std::uint32_t i = lo; i < hi; ++i) {
            for (std::uint64_t j = 0; j < samples[i].num_blocks; ++j) {
                auto blk = machine.frame(buf[f++]);
                std::uint64_t n = std::min<std::uint64_t>(B, samples[i].num_items - j * B);
                cells.insert(cells.end(), blk.begin(), blk.begin() + static_cast<std::ptrdiff_t>(n));
            }
            discard(machine, samples[i]);
        }
        std::sort(cells.begin(), cells.end(), by_item);
        StripedRun sorted = allocate_striped(machine, cells.size());
        write_sweep(machine, sorted, cells, buf.frames());
        add_leaf(lo, hi, std::move(sorted));
    };

    std::uint32_t lo = 0;
    std::uint64_t blocks = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::uint64_t len = samples[i].num_blocks;
        if (len >= m) {
            flush_bundle(lo, i, blocks);
            add_leaf(i, i + 1, samples[i]);
            lo = i + 1;
            blocks = 0;
            continue;
        }
        if (blocks + len > m) {
            flush_bundle(lo, i, blocks);
            lo = i;
            blocks = 0;
        }
        blocks += len;
    }
    flush_bundle(lo, k, blocks);

    const std::uint32_t d1 = u32(params.d1);
    while (level.size() > 1) {
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            int a = level[i];
            int b = level[i + 1];
            const StripedRun* inputs[2] = {&seqs[a], &seqs[b]};
            StripedRun merged;
            {
                auto buf = machine.reserve(2 * d1);
                merged = unit_merge(machine, inputs, d1, D, buf.frames());
            }
            discard(machine, seqs[a]);
            discard(machine, seqs[b]);
            SampleTree::Node node;
            node.lo = tree.nodes[a].lo;
            node.hi = tree.nodes[b].hi;
            node.num_items = merged.num_items;
            node.left = a;
            node.right = b;
            tree.nodes.push_back(node);
            seqs.push_back(std::move(merged));
            next.push_back(static_cast<int>(tree.nodes.size() - 1));
        }
        if (level.size() % 2 == 1) {
            next.push_back(level.back());
        }
        level = std::move(next);
    }
    tree.root = level.front();
    res.canonical = seqs[tree.root];
    return res;
}

// ---- Step 2 -----------------------------------------------------------------

std::uint32_t greedy_pick_color(std::span<const std::uint32_t> overall, std::span<const std::uint32_t> run,
                                std::uint32_t s, std::uint32_t D) {
    for (std::uint32_t c = 0; c + s <= D; c += s) {
        if (std::find(overall.begin(), overall.end(), c) == overall.end() &&
            std::find(run.begin(), run.end(), c) == run.end()) {
            return c;
        }
    }
    throw std::logic_error("no admissible color group");
}

Guide color_canonical(Machine& machine, const StripedRun& canonical, std::span<const std::uint64_t> run_blocks,
                      const GuideParams& params) {
    const std::uint32_t D = machine.disks();
    const std::uint64_t B = machine.block_size();
    const std::uint32_t s = u32(params.s);
    const std::size_t window = params.dbar / params.s - 1;

    Guide guide;
    guide.seq = allocate_striped(machine, canonical.num_items);
    guide.color_counts.assign(D, 0);
    guide.disk_counts.assign(D, 0);

    // q frames of history plus the D2-frame stream buffer
    auto buf = machine.reserve(u32(params.q + params.d2));
    auto io = buf.slice(params.q, params.d2);

    std::vector<std::uint32_t> overall;
    std::vector<std::vector<std::uint32_t>> history(run_blocks.size());
    auto remember = [window](std::vector<std::uint32_t>& h, std::uint32_t c) {
        if (window == 0) {
            return;
        }
        if (h.size() == window) {
            h.erase(h.begin());
        }
        h.push_back(c);
    };

    std::vector<Transfer> t;
    for (std::uint64_t first = 0; first < canonical.num_blocks; first += params.d2) {
        std::uint64_t cnt = std::min<std::uint64_t>(params.d2, canonical.num_blocks - first);
        t.clear();
        for (std::uint64_t i = 0; i < cnt; ++i) {
            auto a = canonical.block(first + i);
            t.push_back({a.disk, a.frame, io[i]});
        }
        machine.input(t);
        for (std::uint64_t i = 0; i < cnt; ++i) {
            auto blk = machine.frame(io[i]);
            std::uint64_t n = std::min<std::uint64_t>(B, canonical.num_items - (first + i) * B);
            for (std::uint64_t e = 0; e < n; ++e) {
                Cell& c = blk[e];
                if (c.run >= history.size()) {
                    throw std::logic_error("canonical entry with unknown run");
                }
                std::uint32_t color = greedy_pick_color(overall, history[c.run], s, D);
                c.color = color;
                c.index = u32(guide.color_counts[color]++);
                std::uint64_t len = std::min<std::uint64_t>(s, run_blocks[c.run] - std::uint64_t{c.seg} * s);
                for (std::uint64_t j = 0; j < len; ++j) {
                    ++guide.disk_counts[color + j];
                }
                remember(overall, color);
                remember(history[c.run], color);
            }
        }
        t.clear();
        for (std::uint64_t i = 0; i < cnt; ++i) {
            auto a = guide.seq.block(first + i);
            t.push_back({a.disk, a.frame, io[i]});
        }
        machine.output(t);
    }
    discard(machine, canonical);
    return guide;
}

std::uint64_t guide_window_violations(std::span<const Cell> guide, std::uint64_t window) {
    if (window <= 1) {
        return 0;
    }
    std::uint64_t bad = 0;
    std::uint32_t runs = 0;
    for (const auto& c : guide) {
        runs = std::max(runs, c.run + 1);
    }
    std::vector<std::vector<std::uint32_t>> per_run(runs);
    for (std::size_t i = 0; i < guide.size(); ++i) {
        const std::size_t from = i >= window - 1 ? i - (window - 1) : 0;
        for (std::size_t j = from; j < i; ++j) {
            if (guide[j].color == guide[i].color) {
                ++bad;
            }
        }
        auto& h = per_run[guide[i].run];
        bad += static_cast<std::uint64_t>(std::count(h.begin(), h.end(), guide[i].color));
        if (h.size() == window - 1) {
            h.erase(h.begin());
        }
        h.push_back(guide[i].color);
    }
    return bad;
}

// ---- Step 3 -----------------------------------------------------------------

std::vector<StripedRun> split_guide(Machine& machine, const StripedRun& guide, const SampleTree& tree,
                                    const GuideParams& params) {
    const std::uint64_t B = machine.block_size();
    const std::uint32_t d1 = u32(params.d1);
    std::vector<StripedRun> colored(tree.sample_items.size());

    auto split_bundle = [&](const SampleTree::Node& node, const StripedRun& seq) {
        std::uint64_t frames = 0;
        for (std::uint32_t i = node.lo; i < node.hi; ++i) {
            frames += ceil_div(tree.sample_items[i], B);
        }
        auto buf = machine.reserve(u32(frames));
        auto cells = read_sweep(machine, BlockView::whole(seq), buf.frames());
        std::vector<std::vector<Cell>> parts(node.hi - node.lo);
        for (const auto& c : cells) {
            if (c.run < node.lo || c.run >= node.hi) {
                throw std::logic_error("guide entry outside its bundle");
            }
            parts[c.run - node.lo].push_back(c);
        }
        std::vector<Transfer> t;
        std::uint32_t f = 0;
        for (std::uint32_t i = node.lo; i < node.hi; ++i) {
            const auto& part = parts[i - node.lo];
            if (part.size() != tree.sample_items[i]) {
                throw std::logic_error("colored sample length mismatch");
            }
            colored[i] = allocate_striped(machine, part.size());
            for (std::uint64_t j = 0; j < colored[i].num_blocks; ++j) {
                auto blk = machine.frame(buf[f]);
                std::uint64_t n = std::min<std::uint64_t>(B, part.size() - j * B);
                std::copy_n(part.begin() + static_cast<std::ptrdiff_t>(j * B), n, blk.begin());
                std::fill(blk.begin() + static_cast<std::ptrdiff_t>(n), blk.end(), kDummyCell);
                auto a = colored[i].block(j);
                t.push_back({a.disk, a.frame, buf[f]});
                ++f;
            }
        }
        scattered_output(machine, t);
    };

    std::function<void(int, const StripedRun&, bool)> visit = [&](int idx, const StripedRun& seq, bool owned) {
        const auto& node = tree.nodes[idx];
        if (node.leaf()) {
            if (node.hi - node.lo == 1) {
                if (!owned) {
                    throw std::logic_error("guide cannot be a single colored sample");
                }
                colored[node.lo] = seq;
                return;
            }
            split_bundle(node, seq);
            if (owned) {
                discard(machine, seq);
            }
            return;
        }
        const auto& left = tree.nodes[node.left];
        StripedRun a = allocate_striped(machine, left.num_items);
        StripedRun b = allocate_striped(machine, tree.nodes[node.right].num_items);
        {
            const StripedRun* children[2] = {&a, &b};
            auto buf = machine.reserve(2 * d1);
            const std::uint32_t boundary = left.hi;
            unit_split(machine, seq, children, [boundary](const Cell& c) -> std::size_t { return c.run < boundary ? 0 : 1; },
                       d1, buf.frames());
        }
        if (owned) {
            discard(machine, seq);
        }
        visit(node.left, a, true);
        visit(node.right, b, true);
    };
    visit(tree.root, guide, false);
    return colored;
}

// ---- Step 4 -----------------------------------------------------------------

MergeLayout allocate_merge_layout(Machine& machine, const Guide& guide, const GuideParams& params) {
    const std::uint32_t D = machine.disks();
    MergeLayout layout;
    layout.base.assign(D, 0);
    layout.size.assign(D, 0);
    layout.used.resize(D);
    for (std::uint32_t d = 0; d < D; ++d) {
        std::uint64_t group = d / params.s * params.s;
        if (group + params.s <= D) {
            layout.size[d] = guide.color_counts[group];
        }
        layout.base[d] = machine.alloc_region(d, layout.size[d]);
        layout.used[d].assign(layout.size[d], false);
    }
    return layout;
}

Placement redistribute_run(Machine& machine, const StripedRun& run, const StripedRun& colored_sample,
                           MergeLayout& layout, const GuideParams& params, std::span<const std::uint32_t> frames) {
    const std::uint64_t s = params.s;
    const std::uint64_t d4 = params.d4;
    const std::uint64_t dbar = params.dbar;
    if (frames.size() != d4 + params.dl) {
        throw std::invalid_argument("redistribution needs D4 + D_L frames");
    }
    auto data = frames.subspan(0, d4);
    StripedReader leaders(machine, BlockView::whole(colored_sample), frames.subspan(d4, params.dl));

    Placement placement;
    placement.blocks.resize(run.num_blocks);
    Cell current{};
    std::vector<Transfer> t;
    for (std::uint64_t first = 0; first < run.num_blocks; first += d4) {
        const std::uint64_t cnt = std::min(d4, run.num_blocks - first);
        t.clear();
        for (std::uint64_t i = 0; i < cnt; ++i) {
            auto a = run.block(first + i);
            t.push_back({a.disk, a.frame, data[i]});
        }
        machine.input(t);
        for (std::uint64_t i = 0; i < cnt; ++i) {
            const std::uint64_t b = first + i;
            if (b % s == 0) {
                current = leaders.pop();
                if (current.seg != b / s) {
                    throw std::logic_error("colored sample out of step with its run");
                }
            }
            auto addr = layout.locate(current.color, current.index, u32(b % s));
            if (addr.disk >= layout.size.size() || current.index >= layout.size[addr.disk]) {
                throw std::logic_error("placement outside the merge layout");
            }
            auto&& slot = layout.used[addr.disk][current.index];
            if (slot) {
                throw std::logic_error("placement collision");
            }
            slot = true;
            placement.blocks[b] = addr;
        }
        for (std::uint64_t g = 0; g < cnt; g += dbar) {
            t.clear();
            for (std::uint64_t i = g; i < std::min(g + dbar, cnt); ++i) {
                const auto& a = placement.blocks[first + i];
                t.push_back({a.disk, a.frame, data[i]});
            }
            machine.output(t);
        }
    }
    if (!leaders.done()) {
        throw std::logic_error("colored sample longer than its run");
    }
    discard(machine, run);
    discard(machine, colored_sample);
    return placement;
}

// ---- Step 5 -----------------------------------------------------------------

SortedRun guided_merge(Machine& machine, std::span<const std::uint64_t> run_items, const StripedRun& guide,
                       const MergeLayout& layout, const GuideParams& params, bool emit_sample,
                       std::uint32_t run_id) {
    const std::uint64_t B = machine.block_size();
    const std::uint64_t s = params.s;
    const std::uint64_t dbar = params.dbar;
    const std::uint64_t dl = params.dl;
    const std::size_t k = run_items.size();

    auto buf = machine.reserve(u32(params.r * s + dbar + 2 * dl + params.d5));
    std::uint64_t off = params.r * s;  // run buffers come first
    auto batch_frames = buf.slice(off, dbar);
    auto guide_frames = buf.slice(off + dbar, dl);
    auto sample_frames = buf.slice(off + dbar + dl, dl);
    auto out_frames = buf.slice(off + dbar + 2 * dl, params.d5);

    std::uint64_t total = 0;
    std::vector<std::uint64_t> run_blocks(k);
    for (std::size_t i = 0; i < k; ++i) {
        total += run_items[i];
        run_blocks[i] = ceil_div(run_items[i], B);
    }

    SortedRun result;
    result.run = allocate_striped(machine, total);
    StripedWriter out(machine, result.run, out_frames);
    StripedRun sample;
    std::optional<StripedWriter> sample_out;
    if (emit_sample) {
        sample = allocate_striped(machine, segment_count(total, B, s));
        sample_out.emplace(machine, sample, sample_frames.subspan(0, std::min<std::uint64_t>(dl, sample.num_blocks)));
    }

    StripedReader guide_in(machine, BlockView::whole(guide), guide_frames);

    struct Segment {
        std::uint32_t run;
        std::vector<Cell> cells;
    };
    std::deque<Segment> batch;
    std::vector<std::vector<Cell>> runbuf(k);
    std::vector<std::size_t> pos(k, 0);

    struct Head {
        Item item;
        std::uint32_t run;
        bool operator>(const Head& o) const { return item > o.item; }
    };
    std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;

    std::vector<Transfer> t;
    std::vector<Cell> entries;
    auto load_batch = [&]() {
        entries.clear();
        while (entries.size() < dbar / s && !guide_in.done()) {
            entries.push_back(guide_in.pop());
        }
        t.clear();
        for (const auto& e : entries) {
            const std::uint64_t len = std::min<std::uint64_t>(s, run_blocks[e.run] - std::uint64_t{e.seg} * s);
            for (std::uint64_t j = 0; j < len; ++j) {
                auto a = layout.locate(e.color, e.index, u32(j));
                t.push_back({a.disk, a.frame, batch_frames[t.size()]});
            }
        }
        machine.input(t);
        std::size_t f = 0;
        for (const auto& e : entries) {
            Segment seg{e.run, {}};
            const std::uint64_t first_block = std::uint64_t{e.seg} * s;
            const std::uint64_t len = std::min<std::uint64_t>(s, run_blocks[e.run] - first_block);
            for (std::uint64_t j = 0; j < len; ++j) {
                auto blk = machine.frame(batch_frames[f++]);
                std::uint64_t n = std::min<std::uint64_t>(B, run_items[e.run] - (first_block + j) * B);
                seg.cells.insert(seg.cells.end(), blk.begin(), blk.begin() + static_cast<std::ptrdiff_t>(n));
            }
            if (seg.cells.front().item != e.item) {
                throw std::logic_error("batch segment does not start with its leader");
            }
            batch.push_back(std::move(seg));
        }
    };

    const std::uint64_t step = s * B;
    std::uint64_t emitted = 0;
    for (;;) {
        const Item* next = nullptr;
        if (!batch.empty()) {
            next = &batch.front().cells.front().item;
        } else if (!guide_in.done()) {
            next = &guide_in.peek().item;
        }
        if (next != nullptr && (heap.empty() || *next < heap.top().item)) {
            if (batch.empty()) {
                load_batch();
            }
            Segment seg = std::move(batch.front());
            batch.pop_front();
            if (pos[seg.run] != runbuf[seg.run].size()) {
                throw std::logic_error("run buffer still occupied when its next segment is due");
            }
            runbuf[seg.run] = std::move(seg.cells);
            pos[seg.run] = 0;
            heap.push({runbuf[seg.run][0].item, seg.run});
            continue;
        }
        if (heap.empty()) {
            break;
        }
        const std::uint32_t r = heap.top().run;
        heap.pop();
        const Cell& c = runbuf[r][pos[r]++];
        if (sample_out && emitted % step == 0) {
            sample_out->push(leader_record(c.item, run_id, emitted / step));
        }
        out.push(c);
        ++emitted;
        if (pos[r] < runbuf[r].size()) {
            heap.push({runbuf[r][pos[r]].item, r});
        }
    }
    if (emitted != total) {
        throw std::logic_error("guided merge lost items");
    }
    out.finish();
    if (sample_out) {
        sample_out->finish();
        result.sample = sample;
    }
    return result;
}

// ---- Driver -----------------------------------------------------------------

namespace {

struct Driver {
    Machine& machine;
    const GuideParams& params;
    const GuidesortOptions& options;
    GuidesortReport& report;

    SortedRun sort(const BlockView& view, bool emit, std::uint32_t run_id, std::uint32_t depth) {
        const std::uint64_t p = view.num_blocks;
        const std::uint64_t k = std::min(ceil_div(p, machine.m()), params.r);
        report.max_depth = std::max(report.max_depth, depth);
        if (k <= 1) {
            PhaseScope phase(machine, "base");
            auto res = base_sort(machine, view, params, emit, run_id);
            ++report.base_calls;
            if (res.sample) {
                report.base_sample_blocks += res.sample->num_blocks;
            }
            return res;
        }
        std::vector<SortedRun> children;
        children.reserve(k);
        const std::uint64_t small = p / k;
        const std::uint64_t extra = p % k;
        std::uint64_t first = 0;
        for (std::uint64_t i = 0; i < k; ++i) {
            const std::uint64_t cnt = small + (i < extra ? 1 : 0);
            children.push_back(sort(view.sub(first, cnt, machine.block_size()), true, u32(i), depth + 1));
            first += cnt;
        }
        return merge(children, emit, run_id, depth);
    }

    SortedRun merge(std::vector<SortedRun>& children, bool emit, std::uint32_t run_id, std::uint32_t depth) {
        const std::size_t k = children.size();
        MergeRecord rec;
        rec.ordinal = u32(report.merges.size());
        rec.depth = depth;
        rec.runs = k;
        machine.set_epoch(rec.ordinal);

        std::vector<StripedRun> samples;
        std::vector<std::uint64_t> run_items(k);
        std::vector<std::uint64_t> run_blocks(k);
        for (std::size_t i = 0; i < k; ++i) {
            run_items[i] = children[i].run.num_items;
            run_blocks[i] = children[i].run.num_blocks;
            rec.run_blocks += run_blocks[i];
            rec.sample_blocks += children[i].sample->num_blocks;
            rec.segments += children[i].sample->num_items;
            samples.push_back(*children[i].sample);
        }

        CanonicalResult canon;
        {
            PhaseScope phase(machine, "step1");
            canon = merge_samples(machine, samples, params);
        }
        rec.leaves = canon.tree.leaves();
        rec.tree_merges = canon.tree.merges();
        for (const auto& n : canon.tree.nodes) {
            if (n.leaf() && n.hi - n.lo > 1) {
                for (std::uint32_t i = n.lo; i < n.hi; ++i) {
                    rec.bundled_blocks += samples[i].num_blocks;
                }
            }
        }

        Guide guide;
        {
            PhaseScope phase(machine, "step2");
            guide = color_canonical(machine, canon.canonical, run_blocks, params);
        }
        if (options.on_guide) {
            auto cells = load_cells(machine, guide.seq);
            options.on_guide(cells, params.dbar / params.s);
        }

        std::vector<StripedRun> colored;
        {
            PhaseScope phase(machine, "step3");
            colored = split_guide(machine, guide.seq, canon.tree, params);
        }

        MergeInfo info;
        info.ordinal = rec.ordinal;
        info.params = &params;
        for (const auto& c : children) {
            info.runs.push_back(c.run);
        }

        MergeLayout layout = allocate_merge_layout(machine, guide, params);
        {
            PhaseScope phase(machine, "step4");
            auto buf = machine.reserve(u32(params.d4 + params.dl));
            for (std::size_t i = 0; i < k; ++i) {
                info.placements.push_back(
                    redistribute_run(machine, children[i].run, colored[i], layout, params, buf.frames()));
            }
        }

        SortedRun out;
        {
            PhaseScope phase(machine, "step5");
            out = guided_merge(machine, run_items, guide.seq, layout, params, emit, run_id);
        }
        if (out.sample) {
            rec.output_sample_blocks = out.sample->num_blocks;
        }
        for (const auto& p : info.placements) {
            for (const auto& a : p.blocks) {
                machine.discard(a.disk, a.frame);
            }
        }
        discard(machine, guide.seq);

        report.z += rec.run_blocks;
        report.y += rec.sample_blocks;
        report.merges.push_back(rec);
        if (options.on_merge) {
            info.output = out.run;
            info.machine = &machine;
            options.on_merge(info);
        }
        if (options.trace) {
            machine.clear_trace();
        }
        return out;
    }
};

}  // namespace

StripedRun guidesort(Machine& machine, const StripedRun& input, const GuideParams& params,
                     const GuidesortOptions& options, GuidesortReport* report) {
    const auto& cfg = machine.config();
    if (options.validate) {
        auto violations = validate_params(params, cfg.m(), cfg.B, cfg.D);
        if (!violations.empty()) {
            throw ParamsError("invalid Guidesort parameters: " + violations.front());
        }
    }
    if (input.num_items == 0) {
        throw std::invalid_argument("guidesort of an empty sequence");
    }
    if (input.width != machine.disks()) {
        throw std::invalid_argument("guidesort input must be striped over all disks");
    }
    GuidesortReport local;
    machine.enable_trace(options.trace);
    Driver driver{machine, params, options, report != nullptr ? *report : local};
    return driver.sort(BlockView::whole(input), false, 0, 0).run;
}

}  // namespace pdmsort
