//! Regenerates `fixtures/`: the reference claims and infection files and the
//! monthly series derived from them.
//!
//!     cargo run -p claimlens --example write_reference_fixtures

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use claimlens::claims::{
    build_joint_series, write_claims_csv, write_covid_csv, write_monthly_csv, YearMonth,
    DEFAULT_POPULATION,
};
use claimlens::synth::reference::{reference_claims, reference_covid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let claims = reference_claims();
    let covid = reference_covid();
    write_claims_csv(
        BufWriter::new(File::create(dir.join("reference_claims.csv"))?),
        &claims,
    )?;
    write_covid_csv(
        BufWriter::new(File::create(dir.join("reference_covid.csv"))?),
        &covid,
    )?;
    let series = build_joint_series(
        &claims,
        &covid,
        DEFAULT_POPULATION,
        YearMonth::new(2019, 8).unwrap(),
        YearMonth::new(2020, 8).unwrap(),
    )?;
    write_monthly_csv(
        BufWriter::new(File::create(dir.join("reference_monthly.csv"))?),
        &series,
    )?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
