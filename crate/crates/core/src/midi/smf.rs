//! Standard MIDI File reader (formats 0 and 1) and a minimal format-0 writer.

use super::{MidiEvent, MidiSong, NoteKind, TempoEvent, TimeSigEvent};
use crate::error::{Error, Result};

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], pos: usize, end: usize) -> Self {
        Reader { bytes, pos, end }
    }

    fn done(&self) -> bool {
        self.pos >= self.end
    }

    fn u8(&mut self) -> Result<u8> {
        if self.pos >= self.end {
            return Err(Error::parse(self.pos, "unexpected end of data"));
        }
        let b = self.bytes[self.pos];
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.end - self.pos < n {
            return Err(Error::parse(
                self.pos,
                format!("need {n} bytes, {} remain", self.end - self.pos),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self) -> Result<u32> {
        let start = self.pos;
        let mut value: u32 = 0;
        for _ in 0..4 {
            let b = self.u8()?;
            value = (value << 7) | u32::from(b & 0x7F);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(Error::parse(
            start,
            "variable-length quantity longer than 4 bytes",
        ))
    }

    fn data_byte(&mut self) -> Result<u8> {
        let at = self.pos;
        let b = self.u8()?;
        if b & 0x80 != 0 {
            return Err(Error::parse(
                at,
                format!("expected data byte, found status 0x{b:02X}"),
            ));
        }
        Ok(b)
    }
}

/// Parse a Standard MIDI File into a merged, absolute-tick [`MidiSong`].
pub fn parse_smf(bytes: &[u8]) -> Result<MidiSong> {
    let mut r = Reader::new(bytes, 0, bytes.len());
    let magic = r.take(4)?;
    if magic != b"MThd" {
        return Err(Error::parse(0, "missing MThd header chunk"));
    }
    let header_len = r.u32()? as usize;
    if header_len < 6 {
        return Err(Error::parse(
            4,
            format!("header chunk length {header_len} < 6"),
        ));
    }
    let header_start = r.pos;
    let format = r.u16()?;
    let n_tracks = r.u16()?;
    let division_at = r.pos;
    let division = r.u16()?;
    if format > 1 {
        return Err(Error::UnsupportedFormat(format));
    }
    if division & 0x8000 != 0 {
        return Err(Error::parse(
            division_at,
            "SMPTE time division is not supported",
        ));
    }
    if division == 0 {
        return Err(Error::parse(
            division_at,
            "ticks per quarter note must be positive",
        ));
    }
    r.take(header_start + header_len - r.pos)?;

    // (tick, track, sequence) ordering key for a stable merge
    let mut notes: Vec<(u64, usize, usize, MidiEvent)> = Vec::new();
    let mut tempo_events = Vec::new();
    let mut time_sig_events = Vec::new();
    let mut end_tick = 0u64;
    let mut tracks_read = 0usize;

    while !r.done() && tracks_read < n_tracks as usize {
        let chunk_at = r.pos;
        let id = r.take(4)?;
        let len = r.u32()? as usize;
        if bytes.len() - r.pos < len {
            return Err(Error::parse(
                chunk_at,
                format!(
                    "chunk length {len} exceeds remaining {} bytes",
                    bytes.len() - r.pos
                ),
            ));
        }
        let body_start = r.pos;
        r.pos += len;
        if id != b"MTrk" {
            continue;
        }
        let mut tr = Reader::new(bytes, body_start, body_start + len);
        let last = read_track(
            &mut tr,
            tracks_read,
            &mut notes,
            &mut tempo_events,
            &mut time_sig_events,
        )?;
        end_tick = end_tick.max(last);
        tracks_read += 1;
    }
    if tracks_read < n_tracks as usize {
        return Err(Error::parse(
            r.pos,
            format!("header declares {n_tracks} tracks, found {tracks_read}"),
        ));
    }

    notes.sort_by_key(|&(tick, track, seq, _)| (tick, track, seq));
    tempo_events.sort_by_key(|t: &(u64, usize, usize, TempoEvent)| (t.0, t.1, t.2));
    time_sig_events.sort_by_key(|t: &(u64, usize, usize, TimeSigEvent)| (t.0, t.1, t.2));

    Ok(MidiSong {
        ticks_per_quarter: division,
        events: notes.into_iter().map(|n| n.3).collect(),
        tempo_events: tempo_events.into_iter().map(|t| t.3).collect(),
        time_sig_events: time_sig_events.into_iter().map(|t| t.3).collect(),
        end_tick,
    })
}

type Keyed<T> = Vec<(u64, usize, usize, T)>;

fn read_track(
    r: &mut Reader<'_>,
    track: usize,
    notes: &mut Keyed<MidiEvent>,
    tempi: &mut Keyed<TempoEvent>,
    sigs: &mut Keyed<TimeSigEvent>,
) -> Result<u64> {
    let mut tick = 0u64;
    let mut running: Option<u8> = None;
    let mut seq = 0usize;
    while !r.done() {
        tick += u64::from(r.vlq()?);
        seq += 1;
        let status_at = r.pos;
        let first = r.u8()?;
        let (status, first_data) = if first & 0x80 != 0 {
            (first, None)
        } else {
            match running {
                Some(s) => (s, Some(first)),
                None => return Err(Error::parse(status_at, "data byte without running status")),
            }
        };
        match status {
            0xFF => {
                running = None;
                let kind = r.u8()?;
                let len = r.vlq()? as usize;
                let data_at = r.pos;
                let data = r.take(len)?;
                match kind {
                    0x2F => return Ok(tick),
                    0x51 => {
                        if len != 3 {
                            return Err(Error::parse(data_at, "Set Tempo must carry 3 bytes"));
                        }
                        let us = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                        if us == 0 {
                            return Err(Error::parse(data_at, "tempo must be positive"));
                        }
                        tempi.push((
                            tick,
                            track,
                            seq,
                            TempoEvent {
                                tick,
                                us_per_quarter: us,
                            },
                        ));
                    }
                    0x58 => {
                        if len < 2 {
                            return Err(Error::parse(
                                data_at,
                                "Time Signature needs at least 2 bytes",
                            ));
                        }
                        if data[1] > 15 {
                            return Err(Error::parse(
                                data_at + 1,
                                "time signature denominator exponent too large",
                            ));
                        }
                        sigs.push((
                            tick,
                            track,
                            seq,
                            TimeSigEvent {
                                tick,
                                numerator: data[0],
                                denominator: 1u16 << data[1],
                            },
                        ));
                    }
                    _ => {}
                }
            }
            0xF0 | 0xF7 => {
                running = None;
                let len = r.vlq()? as usize;
                r.take(len)?;
            }
            0x80..=0xEF => {
                running = Some(status);
                let d0 = match first_data {
                    Some(b) => b,
                    None => r.data_byte()?,
                };
                let kind = status & 0xF0;
                let channel = status & 0x0F;
                match kind {
                    0xC0 | 0xD0 => {}
                    _ => {
                        let d1 = r.data_byte()?;
                        if kind == 0x80 || kind == 0x90 {
                            notes.push((
                                tick,
                                track,
                                seq,
                                MidiEvent {
                                    tick,
                                    channel,
                                    kind: if kind == 0x90 {
                                        NoteKind::On
                                    } else {
                                        NoteKind::Off
                                    },
                                    note: d0,
                                    velocity: d1,
                                },
                            ));
                        }
                    }
                }
            }
            other => {
                return Err(Error::parse(
                    status_at,
                    format!("unexpected status byte 0x{other:02X}"),
                ));
            }
        }
    }
    Ok(tick)
}

fn push_vlq(out: &mut Vec<u8>, mut value: u32) {
    let mut buf = [0u8; 4];
    let mut n = 0;
    loop {
        buf[n] = (value & 0x7F) as u8;
        n += 1;
        value >>= 7;
        if value == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        out.push(if i > 0 { buf[i] | 0x80 } else { buf[i] });
    }
}

/// Serialize a song as a single-track format-0 file.
///
/// Meta events are written before note events at the same tick. Delta times
/// must fit a 4-byte VLQ.
pub fn encode_smf(song: &MidiSong) -> Vec<u8> {
    enum Item {
        Tempo(u32),
        Sig(u8, u16),
        Note(MidiEvent),
    }
    let mut items: Vec<(u64, u8, Item)> = Vec::new();
    for t in &song.tempo_events {
        items.push((t.tick, 0, Item::Tempo(t.us_per_quarter)));
    }
    for s in &song.time_sig_events {
        items.push((s.tick, 0, Item::Sig(s.numerator, s.denominator)));
    }
    for e in &song.events {
        items.push((e.tick, 1, Item::Note(*e)));
    }
    items.sort_by_key(|(tick, prio, _)| (*tick, *prio));

    let mut body = Vec::new();
    let mut now = 0u64;
    for (tick, _, item) in &items {
        push_vlq(&mut body, (tick - now) as u32);
        now = *tick;
        match item {
            Item::Tempo(us) => {
                body.extend_from_slice(&[0xFF, 0x51, 0x03]);
                body.extend_from_slice(&us.to_be_bytes()[1..]);
            }
            Item::Sig(num, den) => {
                let exp = den.trailing_zeros() as u8;
                body.extend_from_slice(&[0xFF, 0x58, 0x04, *num, exp, 24, 8]);
            }
            Item::Note(e) => {
                let status = match e.kind {
                    NoteKind::On => 0x90,
                    NoteKind::Off => 0x80,
                } | (e.channel & 0x0F);
                body.extend_from_slice(&[status, e.note & 0x7F, e.velocity & 0x7F]);
            }
        }
    }
    push_vlq(&mut body, song.end_tick.saturating_sub(now) as u32);
    body.extend_from_slice(&[0xFF, 0x2F, 0x00]);

    let mut out = Vec::with_capacity(body.len() + 22);
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&0u16.to_be_bytes());
    out.extend_from_slice(&1u16.to_be_bytes());
    out.extend_from_slice(&song.ticks_per_quarter.to_be_bytes());
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    out
}
