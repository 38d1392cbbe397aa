//! Writing a model in the text format and fixing its leak by control.
//!
//! A request is served either from a cache or from disk. The secret is
//! whether the cache was hit. Answering a cache hit as soon as it is ready
//! leaks it; padding the answer to the disk latency does not.
//!
//! ```bash
//! cargo run --example custom_model
//! ```

use timed_opacity::{parse_model, render_model, synth_ctrl, SynthOptions};

const MODEL: &str = "
ta cache
clocks x
controllable fast padded ;
uncontrollable hit miss reply
secret location cached
init idle
final served

loc idle inv x <= 0
loc cached inv x <= 5
loc disk inv x <= 5
loc served

edge idle -> cached sync hit
edge idle -> disk sync miss
edge cached -> served when x >= 1 sync fast
edge cached -> served when x >= 4 sync padded
edge disk -> served when x >= 4 sync reply
";

fn main() {
    let ta = parse_model(MODEL).expect("model parses");
    print!("{}", render_model(&ta).expect("model renders"));

    let options = SynthOptions { effective_only: true, ..Default::default() };
    let result = synth_ctrl(&ta, &options).expect("synthesis is conclusive");
    for (strategy, verdict) in &result.strategies {
        println!("keep {strategy}: dpriv {} dpub {}", verdict.dpriv, verdict.dpub);
    }
}
