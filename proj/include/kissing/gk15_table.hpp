#pragma once

// x >= 0 half of the 15-point Kronrod rule; gauss weight 0 marks Kronrod-only nodes.
namespace kissing::detail {

inline constexpr const char* kGK15[8][3] = {
    {"0.0", "0.209482141084727828012999174891714263697762080223704316712998", "0.417959183673469387755102040816326530612244897959183673469388"},
    {"0.207784955007898467600689403773244913479784407145170649713846", "0.204432940075298892414161999234649084716517604180718357424471", "0"},
    {"0.405845151377397166906606412076961463347382014099370126387043", "0.190350578064785409913256402421013682826078075455358355885441", "0.381830050505118944950369775488975133878365083533862734751083"},
    {"0.586087235467691130294144838258729598436780750604360951304993", "0.16900472663926790282658342659855028410624490030294424149734", "0"},
    {"0.741531185599394439863864773280788407074147647141390260119955", "0.140653259715525918745189590510237920399889757247998575561745", "0.279705391489276667901467771423779582486925065226598764537014"},
    {"0.864864423359769072789712788640926201210972307074088148601458", "0.104790010322250183839876322541518017443756654213830611893391", "0"},
    {"0.949107912342758524526189684047851262400770937670617783548769", "0.0630920926299785532907006631892042866650711572115507071136055", "0.129484966168869693270611432679082018328587402259946663977209"},
    {"0.991455371120812639206854697526328516642044338370334701291087", "0.0229353220105292249637320080589695919935608112757469922675074", "0"},
};

}  // namespace kissing::detail
