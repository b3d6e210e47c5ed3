//! Trace CSV files.
//!
//! Floats are written with 17 significant digits so a trace read back
//! replays bit-exactly.

use std::io::{Read, Write};

use super::CliError;
use crate::engine::{Trace, TraceEvent, TraceRecord};

pub const TRACE_HEADER: [&str; 12] = [
    "t_s",
    "r_ft",
    "h_ft",
    "v_fps",
    "a_o_fps2",
    "a_i_fps2",
    "r_v_fps",
    "adv_w",
    "adv_vlo_fps",
    "adv_vup_fps",
    "event",
    "nmac",
];

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace<W: Write>(trace: &Trace, out: W) -> Result<(), CliError> {
    let mut w = ::csv::Writer::from_writer(out);
    let io = |e: ::csv::Error| CliError::Io(e.to_string());
    w.write_record(TRACE_HEADER).map_err(io)?;
    for r in &trace.records {
        w.write_record([
            fmt_f64(r.t_abs),
            fmt_f64(r.r),
            fmt_f64(r.h),
            fmt_f64(r.v),
            fmt_f64(r.a_o),
            fmt_f64(r.a_i),
            fmt_f64(r.r_v),
            format!("{}", r.adv_w as i8),
            fmt_f64(r.adv_v_lo),
            r.adv_v_up.map(fmt_f64).unwrap_or_default(),
            r.event.map(|e| e.name().to_string()).unwrap_or_default(),
            u8::from(r.nmac).to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_trace<R: Read>(input: R) -> Result<Trace, CliError> {
    let mut rd = ::csv::Reader::from_reader(input);
    let parse_err = |line: usize, what: &str| CliError::Parse(format!("trace row {line}: bad {what}"));
    let header = rd.headers().map_err(|e| CliError::Parse(e.to_string()))?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(CliError::Parse("trace header does not match".into()));
    }
    let mut trace = Trace::default();
    for (i, row) in rd.records().enumerate() {
        let row = row.map_err(|e| CliError::Parse(e.to_string()))?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64, CliError> {
            row[k].parse::<f64>().map_err(|_| parse_err(line, TRACE_HEADER[k]))
        };
        let adv_v_up = if row[9].is_empty() { None } else { Some(num(9)?) };
        let event = if row[10].is_empty() {
            None
        } else {
            Some(TraceEvent::parse(&row[10]).ok_or_else(|| parse_err(line, "event"))?)
        };
        let nmac = match &row[11] {
            "0" => false,
            "1" => true,
            _ => return Err(parse_err(line, "nmac")),
        };
        trace.records.push(TraceRecord {
            t_abs: num(0)?,
            r: num(1)?,
            h: num(2)?,
            v: num(3)?,
            a_o: num(4)?,
            a_i: num(5)?,
            r_v: num(6)?,
            adv_w: num(7)?,
            adv_v_lo: num(8)?,
            adv_v_up,
            event,
            nmac,
            region_holds: None,
        });
    }
    Ok(trace)
}
