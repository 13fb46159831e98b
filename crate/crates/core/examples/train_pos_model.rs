//! Regenerates the shipped part-of-speech model from the embedded tagged
//! corpus:
//!
//! ```text
//! cargo run -p absa-augment --example train_pos_model
//! ```
//!
//! Writes `resources/pos.model` inside the crate directory.

use std::path::Path;

use absa_augment::tagger::{self, TrainOptions};

fn main() {
    let corpus = tagger::parse_tagged_corpus(tagger::TRAINING_CORPUS).expect("corpus parses");

    // Held-out score first, for the record.
    let probe = tagger::train(
        &corpus,
        &TrainOptions {
            iterations: 8,
            heldout_fraction: 0.1,
            ..TrainOptions::default()
        },
    )
    .expect("training succeeds");
    println!(
        "{} sentences: train accuracy {:.3}, held-out accuracy {}",
        corpus.len(),
        probe.train_accuracy,
        probe
            .heldout_accuracy
            .map(|a| format!("{a:.3}"))
            .unwrap_or_else(|| "n/a".to_string()),
    );

    // The shipped model uses every sentence.
    let full = tagger::train(
        &corpus,
        &TrainOptions {
            iterations: 8,
            heldout_fraction: 0.0,
            ..TrainOptions::default()
        },
    )
    .expect("training succeeds");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/pos.model");
    tagger::save_model(&full.model, &path).expect("model written");
    println!("wrote {} (train accuracy {:.3})", path.display(), full.train_accuracy);
}
