use std::time::Instant;
use soscert::exactnum::BetaRoot;
use soscert::pipeline::*;

fn main() {
    let cfg = PipelineConfig::default();
    let c = PaperConstants::new(BetaRoot::First);
    let t = Instant::now();
    let (rec1, found) = stage_block1(&c, &cfg);
    println!("block1: {:?} {:.2}s", rec1.status, t.elapsed().as_secs_f64());
    let t = Instant::now();
    let rec2 = stage_block2(&c);
    println!("block2: {:?} {:.2}s", rec2.status, t.elapsed().as_secs_f64());
    let fp = found.expect("block1 point");
    let t = Instant::now();
    let rec3 = stage_combined(&c, &fp, &cfg);
    println!("combined: {:?} {:.2}s", rec3.status, t.elapsed().as_secs_f64());
    println!("  numbers: {:?}", rec3.numbers);
    if rec3.status != StageStatus::Pass {
        println!("  cert: {}", rec3.certificate);
    }
    let t = Instant::now();
    let rec4 = stage_positivity(&c);
    println!("positivity: {:?} {:.2}s", rec4.status, t.elapsed().as_secs_f64());
    println!("  numbers: {:?}", rec4.numbers);
    let t = Instant::now();
    let rec6 = stage_variants(&c, Some(&fp), &cfg);
    println!("variants: {:?} {:.2}s", rec6.status, t.elapsed().as_secs_f64());
    println!("  numbers: {:?}", rec6.numbers);
    if rec6.status != StageStatus::Pass {
        println!("  cert: {}", rec6.certificate);
    }
    let t = Instant::now();
    let rec5 = stage_smoothness(&c, &cfg);
    println!("smoothness: {:?} {:.2}s", rec5.status, t.elapsed().as_secs_f64());
    println!("  numbers: {:?}", rec5.numbers);
}
