//! CSV emission of sweep tables and number formatting.

use std::io::Write;
use std::path::Path;

use fiberspec::atlas::{Exactness, PredictedCounts, SweepRow};
use fiberspec::integrals::Side;

pub const HEADER: [&str; 17] = [
    "lambda",
    "mu",
    "gamma",
    "K1",
    "K2",
    "region_s",
    "region_d",
    "region_cplus",
    "region_cminus",
    "pred_below",
    "pred_above",
    "comp_below",
    "comp_above",
    "eigs_below",
    "eigs_above",
    "agree",
    "error",
];

/// 12 significant digits, shortest of fixed and exponent form, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn fmt_pred(pred: &PredictedCounts, side: Side, k0: bool) -> String {
    if k0 {
        let r = pred.k0(side);
        if r.is_exact() {
            r.lo.to_string()
        } else {
            format!("{}..{}", r.lo, r.hi)
        }
    } else {
        match pred.exactness(side) {
            Exactness::Exact => pred.lower_bound(side).to_string(),
            Exactness::LowerBound => format!(">={}", pred.lower_bound(side)),
        }
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(";")
}

pub fn row_fields(row: &SweepRow) -> Vec<String> {
    let k0 = row.k.is_origin();
    let (s, d, cp, cm) = match &row.label {
        Some(l) => (l.s_name(), l.d_name(), l.c_plus.name(Side::Above), l.c_minus.name(Side::Below)),
        None => Default::default(),
    };
    let (pb, pa) = match &row.predicted {
        Some(p) => (fmt_pred(p, Side::Below, k0), fmt_pred(p, Side::Above, k0)),
        None => Default::default(),
    };
    let (cb, ca) = match row.computed {
        Some((b, a)) => (b.to_string(), a.to_string()),
        None => Default::default(),
    };
    vec![
        fmt_num(row.lambda),
        fmt_num(row.mu),
        fmt_num(row.gamma),
        fmt_num(row.k.p1()),
        fmt_num(row.k.p2()),
        s,
        d,
        cp,
        cm,
        pb,
        pa,
        cb,
        ca,
        fmt_list(&row.eigs_below),
        fmt_list(&row.eigs_above),
        row.agree.to_string(),
        row.error.clone().unwrap_or_default(),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(row_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> csv::Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Records of a CSV document written by [`write_csv`], header excluded.
pub fn parse_csv(text: &str) -> csv::Result<Vec<Vec<String>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, "unexpected header")));
    }
    r.records().map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect())).collect()
}

pub fn parse_list(field: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    if field.is_empty() {
        return Ok(vec![]);
    }
    field.split(';').map(str::parse).collect()
}
