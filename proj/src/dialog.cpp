#include "nectar/dialog.hpp"

namespace nectar {

namespace {

// Reads one chunk into rec.inbound_bytes, honoring the capture cap.
// Returns the IoStatus of the read; sets rec.truncated when the cap is hit.
IoStatus read_chunk(TcpStream &stream, ConnectionRecord &rec, const DialogOptions &opts,
                    Deadline deadline) {
    if (rec.inbound_bytes.size() >= opts.capture_cap) {
        rec.truncated = true;
        return IoStatus::eof;
    }
    std::uint8_t buf[4096];
    std::size_t want = sizeof(buf);
    std::uint64_t room = opts.capture_cap - rec.inbound_bytes.size();
    if (room < want) want = static_cast<std::size_t>(room);
    std::size_t n = 0;
    IoStatus st = stream.read_some(buf, want, deadline, n);
    if (st == IoStatus::ok) {
        rec.inbound_bytes.insert(rec.inbound_bytes.end(), buf, buf + n);
        if (rec.inbound_bytes.size() >= opts.capture_cap) rec.truncated = true;
    }
    return st;
}

bool seen(const ConnectionRecord &rec, const Bytes &pattern) {
    return contains(rec.inbound_bytes, pattern);
}

} // namespace

ConnectionRecord run_dialog(const EmulatedService &service, TcpStream &stream, const DialogContext &ctx,
                            const DialogOptions &opts) {
    ConnectionRecord rec;
    rec.record_id = ctx.record_id;
    rec.sensor_id = ctx.sensor_id;
    rec.src_addr = ctx.peer;
    rec.dst_addr = ctx.local;
    rec.service_name = service.name;
    rec.started_at = ctx.started_at;
    rec.dialog_completed = true;

    for (std::size_t idx = 0; idx < service.dialog.size(); ++idx) {
        const auto &step = service.dialog[idx];
        if (step.kind == DialogStep::Kind::send) {
            if (!stream.write_all(step.payload, Deadline::in(opts.send_timeout))) {
                // Peer gone before the script finished; remaining Expects are unmatched.
                for (std::size_t rest = idx + 1; rest < service.dialog.size(); ++rest)
                    if (service.dialog[rest].kind == DialogStep::Kind::expect) rec.dialog_completed = false;
                return rec;
            }
            rec.outbound_bytes.insert(rec.outbound_bytes.end(), step.payload.begin(), step.payload.end());
        } else {
            Deadline deadline = Deadline::in(
                std::chrono::milliseconds(static_cast<long>(step.timeout_s * 1000)));
            while (!seen(rec, step.payload)) {
                IoStatus st = read_chunk(stream, rec, opts, deadline);
                if (st == IoStatus::ok) continue;
                rec.dialog_completed = false;
                return rec; // timeout, peer close or cap before the pattern arrived
            }
        }
    }

    // Post-dialog capture phase.
    auto capture_until_close = [&] {
        while (true) {
            IoStatus st = read_chunk(stream, rec, opts, Deadline::in(opts.idle_timeout));
            if (st != IoStatus::ok) break;
        }
    };
    switch (service.capture.kind) {
    case CaptureMode::Kind::until_close: capture_until_close(); break;
    case CaptureMode::Kind::fixed_length:
        while (rec.inbound_bytes.size() < service.capture.length) {
            IoStatus st = read_chunk(stream, rec, opts, Deadline::in(opts.idle_timeout));
            if (st != IoStatus::ok) break;
        }
        break;
    case CaptureMode::Kind::after_trigger:
        while (!seen(rec, service.capture.trigger)) {
            IoStatus st = read_chunk(stream, rec, opts, Deadline::in(opts.idle_timeout));
            if (st != IoStatus::ok) return rec;
        }
        capture_until_close();
        break;
    }
    return rec;
}

} // namespace nectar
