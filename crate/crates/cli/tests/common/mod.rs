#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub const AIRLINE_CONLL: &str = "\
# intent: airline
which\tO
airlines\tO
have\tO
daily\tB-flight_days
flights\tO
from\tO
denver\tB-city_name
to\tO
san\tB-city_name
francisco\tI-city_name
on\tO
April\tB-month_name
1st\tB-day_number

# intent: airline
are\tO
there\tO
any\tO
monthly\tB-flight_days
airplanes\tO
from\tO
boston\tB-city_name
to\tO
dallas\tB-city_name
on\tO
4th\tB-day_number
May\tB-month_name

# intent: airline
show\tO
me\tO
the\tO
airlines\tO
that\tO
fly\tO
from\tO
Beijing\tB-city_name
to\tO
Shanghai\tB-city_name
please\tO
";

pub fn eastgen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eastgen"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = eastgen(dir, args);
    assert!(
        out.status.success(),
        "eastgen {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

pub fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// `(path, sha256)` of every output recorded in a manifest.
pub fn output_checksums(manifest: &str) -> Vec<(String, String)> {
    let value: serde_json::Value = serde_json::from_str(manifest).unwrap();
    value["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| {
            (
                o["path"].as_str().unwrap().to_string(),
                o["sha256"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}
