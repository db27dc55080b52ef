import { BridgeClient } from "./client.js";
import { bind } from "./dom.js";
import { TabletViewModel } from "./viewmodel.js";
const client = new BridgeClient(window.location.origin);
const vm = new TabletViewModel(client);
bind(vm, document.getElementById("tablet"));
vm.start();
